"""JSON form of non-membership certificates and their search-free verification.

Numbers are strings ``"x ± r"``; exact values carry ``± 0``.  Cover
breakpoints are dyadic, so they are stored exactly and replayed as is; the
outer ends of each cover are recomputed from the quotient rule.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from .certify import (
    NOT_IN_LP,
    NonMembershipCertificate,
    apolarity_residual,
    circle_modulus_squared,
    domination_row,
    lemma_q2_floor,
    nonnegative_on,
    phi_truncation,
    rouche_margin,
    s4_coeffs,
    section_target,
)
from .cover import Cover, SeriesTarget, replay_cover
from .interval import Bracket, format_exact, format_pm, parse_exact
from .poly import RealPolynomial
from .series import QuotientRule, SeriesError
from .winding import CircleFunction, WindingInconclusive, winding_details

FORMAT_VERSION = 1


def pm(x) -> str:
    return format_pm(Fraction(x))


def pm_bracket(b: Bracket) -> str:
    return format_pm(b.mid, b.radius)


def _cover_json(cover: Cover) -> dict:
    return {
        "breakpoints": [format_exact(a) for a, _, _ in cover.boxes[1:]],
        "lower_bounds": [pm(lb) for _, _, lb in cover.boxes],
    }


def certificate_to_json(cert: NonMembershipCertificate) -> dict[str, Any]:
    pos = cert.positivity
    out: dict[str, Any] = {
        "format": FORMAT_VERSION,
        "conclusion": cert.conclusion,
        "rule": cert.rule.to_json(),
        "q2": format_exact(cert.q2),
        "q3": format_exact(cert.q3),
        "q4": format_exact(cert.q4),
        "limit": format_exact(cert.limit),
        "qinf": pm_bracket(cert.qinf),
        "lemma_q2_floor": {
            "residual": format_exact(cert.lemma.residual),
            "reduced": format_exact(cert.lemma.reduced),
            "power_sum": format_exact(cert.lemma.power_sum),
            "verdict": cert.lemma.verdict,
        },
        "positivity_witness": {
            "m": pos.m,
            "section_degree": pos.section_degree,
            "unit_ratio": format_exact(pos.unit_ratio),
            "remainder_ratio": format_exact(pos.remainder_ratio),
            "domination": [{"k": r.k, "method": r.method, "slack": pm(r.slack)} for r in pos.domination],
            "section_cover": {"deflation": list(pos.section_deflation), **_cover_json(pos.section_cover)},
            "endpoint_group": format_exact(pos.endpoint_group),
            "endpoint_value": pm_bracket(pos.endpoint_value),
            "direct_cover": {"truncation": pos.direct_truncation, **_cover_json(pos.direct_cover)},
        },
        "circle_lower_bound": {
            "value": format_exact(cert.circle.bound),
            "exact_check": cert.circle.exact,
            "sampled_min_sq": pm(cert.circle.sampled_min_sq),
            "mesh": cert.circle.mesh,
        },
        "tail_upper_bound": {
            "value": format_exact(cert.tail.bound),
            "sampled_max": pm(Fraction(cert.tail.sampled_max)),
            "mesh": cert.tail.mesh,
            "model": cert.tail.model,
        },
        "rouche_margin": format_exact(cert.rouche_margin),
        "grace_witness": {
            "b": [format_exact(v) for v in cert.grace.b],
            "Q": [format_exact(v) for v in cert.grace.Q.coeffs],
            "roots": [format_exact(v) for v in cert.grace.roots],
            "apolarity_residual": format_exact(cert.grace.residual),
            "roots_in_closed_disk": cert.grace.roots_in_disk,
            "s4_inside": cert.grace.s4_inside,
            "arcs": cert.grace.s4_arcs,
        },
        "phi_inside": cert.phi_inside,
        "notes": list(cert.notes),
    }
    if cert.oracle is not None:
        out["oracle"] = {"degree": cert.oracle.degree, "nonreal": cert.oracle.nonreal,
                         "pairs_in_disk": cert.oracle.pairs_in_disk}
    return out


def dumps(obj: Any) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


# -- verification -------------------------------------------------------------------------------


@dataclass
class VerifyReport:
    checks: list[tuple[str, bool, str]] = field(default_factory=list)

    def add(self, name: str, ok: bool, detail: str = "") -> bool:
        self.checks.append((name, bool(ok), detail))
        return bool(ok)

    @property
    def ok(self) -> bool:
        return bool(self.checks) and all(c[1] for c in self.checks)

    def lines(self) -> list[str]:
        return [f"{'PASS' if ok else 'FAIL'}  {name}" + (f"  ({d})" if d else "") for name, ok, d in self.checks]


def _replay(target, lo: Fraction, hi: Fraction, data: dict) -> bool:
    pts = [lo] + [parse_exact(t) for t in data["breakpoints"]] + [hi]
    if any(a >= b for a, b in zip(pts, pts[1:])) and lo != hi:
        return False
    boxes = tuple((a, b, Fraction(0)) for a, b in zip(pts, pts[1:]))
    return replay_cover(target, Cover(lo, hi, boxes))


def verify_certificate(obj: dict, winding: bool = True) -> VerifyReport:
    """Recheck every numbered claim from the rule and the stored witnesses alone.

    Nothing is searched for: m, the truncation order, the cover breakpoints
    and the mesh sizes are read from the certificate.
    """
    rep = VerifyReport()
    try:
        rule = QuotientRule.from_json(obj["rule"]).normalized()
    except (KeyError, SeriesError) as e:
        rep.add("rule", False, str(e))
        return rep
    rep.add("conclusion", obj.get("conclusion") == NOT_IN_LP)
    rep.add("rule has an analytic limit", not rule.finite and rule.limit is not None)
    if not rep.ok:
        return rep
    rep.add("quotients increasing", bool(rule.increasing))
    q2, q3, q4, c = rule.q_at(2), rule.q_at(3), rule.q_at(4), rule.limit
    stored = [parse_exact(obj[k]) for k in ("q2", "q3", "q4", "limit")]
    rep.add("q2, q3, q4, limit match the rule", stored == [q2, q3, q4, c])
    rep.add("3 <= q2 < 4", 3 <= q2 < 4)

    lemma = lemma_q2_floor(1, 1, 1 / q2, 1 / (q2 * q2 * q3))
    rep.add("q2 floor lemma residual", parse_exact(obj["lemma_q2_floor"]["residual"]) == lemma.residual
            and lemma.residual >= 0, f"reduced form {lemma.reduced}")

    pw = obj["positivity_witness"]
    m = int(pw["m"])
    rep.add("[0, 1]: term ratio below 1", parse_exact(pw["unit_ratio"]) == 1 / q2 < 1)
    rep.add("(1, q2]: remainder terms decrease", parse_exact(pw["remainder_ratio"]) == 1 / q3 < 1)
    rows = [domination_row(rule.q_at, k) for k in range(1, m + 1)]
    rep.add(f"pair domination k = 1..{m}", all(r.holds for r in rows))
    deflation = tuple(pw["section_cover"]["deflation"])
    sec = section_target(c, 2 * m + 1, deflation)
    rep.add(f"theta section of degree {2 * m + 1} positive on [1, c]",
            _replay(sec, Fraction(1), c, pw["section_cover"]))
    group = 1 - q2 / q3
    rep.add("endpoint grouping", parse_exact(pw["endpoint_group"]) == group >= 0)
    K = int(pw["direct_cover"]["truncation"])
    K2, coeffs, tail = phi_truncation(rule, q2)
    if K2 != K:
        rep.add("direct cover truncation", False, f"stored {K}, recomputed {K2}")
    else:
        target = SeriesTarget(coeffs, tail)
        rep.add("phi(q2) > 0", target.point(q2).lo > 0)
        rep.add("direct cover of phi on [0, q2]", _replay(target, Fraction(0), q2, pw["direct_cover"]))

    bound = q2 / (q3 * q3 * q4)
    rep.add("circle bound value", parse_exact(obj["circle_lower_bound"]["value"]) == bound)
    H = circle_modulus_squared(s4_coeffs(q2, q3, q4), q2)
    rep.add("|S4|^2 >= bound^2 on the circle (Sturm)",
            nonnegative_on(H - RealPolynomial([bound * bound]), Fraction(-1), Fraction(1)))
    tb = q2 / (q3**3 * q4**3 - q3 * q3)
    rep.add("tail bound value", parse_exact(obj["tail_upper_bound"]["value"]) == tb)
    margin = rouche_margin(q2, q3, q4)
    rep.add("Rouche margin positive", parse_exact(obj["rouche_margin"]) == margin > 0, str(margin))

    gw = obj["grace_witness"]
    b = [parse_exact(v) for v in gw["b"]]
    rep.add("apolar partner", b == [0, 0, -q2 * (q2 - 4) / 2, (q2 - 6) / 2, 1])
    rep.add("apolarity residual exactly 0", apolarity_residual(s4_coeffs(q2, q3, q4), b) == 0)
    roots = [parse_exact(v) for v in gw["roots"]]
    rep.add("partner zeros in the closed disk",
            RealPolynomial.from_roots(roots) == RealPolynomial([0, 0, 6 * b[2], 4 * b[3], 1])
            and all(abs(z) <= q2 for z in roots))
    if winding and gw.get("arcs"):
        arcs = int(gw["arcs"])
        try:
            w = winding_details(CircleFunction(s4_coeffs(q2, q3, q4)), q2, start=arcs, cap=arcs).count
            rep.add("S4 zeros inside |z| < q2 (cross-check)", w >= 1 and w == gw["s4_inside"], str(w))
        except WindingInconclusive as e:
            rep.add("S4 zeros inside |z| < q2 (cross-check)", False, str(e))
    return rep


def load_certificate(text: str) -> dict:
    return json.loads(text)
