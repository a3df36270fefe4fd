"""Command-line entry point.

Exit codes: 0 definite answer, 1 failed reproduction check, 2 inconclusive,
64 input error, 70 precision cap reached.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import platform
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Optional, Sequence

from . import __version__
from .certify import (
    IN_LP,
    INCONCLUSIVE,
    NOT_IN_LP,
    HutchinsonReport,
    certify_not_lp,
    classify,
    hutchinson_check,
)
from .certio import certificate_to_json, dumps, pm, pm_bracket, verify_certificate
from .cover import PrecisionCapError
from .interval import Bracket, format_exact
from .poly import RealPolynomial
from .roots import czds_check, hyperbolicity_report
from .series import QuotientRule, SeriesError, load_series, quotients, to_fraction
from .theta import (
    DEFAULT_TOL,
    ThetaParams,
    Undecidable,
    cn_table_csv,
    compute_cn_sweep,
    estimate_qinf,
    spectrum,
    spectrum_csv,
    theta_eval,
)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_INCONCLUSIVE = 2
EXIT_INPUT = 64
EXIT_PRECISION = 70


@dataclass
class RunConfig:
    command: str
    source: Optional[str] = None  # input path or inline rule
    tol: Fraction = DEFAULT_TOL
    budgets: dict[str, int] = field(default_factory=dict)
    fmt: str = "text"
    out: Optional[Path] = None
    jobs: int = 1

    def __post_init__(self):
        if self.tol <= 0:
            raise SeriesError("--tol must be positive")
        if self.jobs < 1:
            raise SeriesError("--jobs must be at least 1")
        if self.fmt not in ("json", "csv", "text"):
            raise SeriesError(f"unknown format {self.fmt!r}")


@dataclass
class Outcome:
    """What a command produced: the data artifact and its exit status."""

    status: int
    data: Any  # dict for json, list of rows for csv
    text: str
    header: Optional[list[str]] = None  # csv column order


# -- rendering -----------------------------------------------------------------------


def _csv(header: Sequence[str], rows: Sequence[Sequence[Any]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def render(out: Outcome, fmt: str) -> str:
    if fmt == "json":
        return dumps(out.data)
    if fmt == "csv":
        if out.header is None and out.data is None:
            return out.text  # table already rendered by the module's own emitter
        if out.header is None:
            raise SeriesError("this command has no CSV form; use --format json or text")
        return _csv(out.header, out.data)
    return out.text if out.text.endswith("\n") else out.text + "\n"


def _num(x: Fraction, digits: int = 12) -> str:
    return f"{float(x):.{digits}g}"


# -- input -------------------------------------------------------------------------------


def _source(args) -> Any:
    if getattr(args, "rule", None):
        return QuotientRule.from_json(args.rule)
    if getattr(args, "file", None):
        return args.file
    raise SeriesError("give --file PATH or --rule JSON")


def _rule_or_series(args, n: int = 1):
    src = _source(args)
    if isinstance(src, QuotientRule):
        return src
    series = load_series(src, n)
    return series.rule if series.rule is not None else series


def _poly(args) -> RealPolynomial:
    if args.coeffs:
        parts = [p for p in args.coeffs.replace(";", ",").split(",") if p.strip()]
        return RealPolynomial([to_fraction(p) for p in parts])
    if args.file:
        return RealPolynomial(load_series(args.file).entries)
    raise SeriesError("give --coeffs c0,c1,... or --file PATH")


# -- commands ----------------------------------------------------------------------------


def cmd_quotients(args, cfg: RunConfig) -> Outcome:
    series = load_series(_source(args), args.n_max)
    prof = quotients(series, args.n_max)
    rows = [[n, pm(prof.p_at(n)), pm(prof.q_at(n)) if n >= 2 else ""] for n in range(1, args.n_max + 1)]
    data = {
        "p": [pm(v) for v in prof.p],
        "q": [pm(v) for v in prof.q],
        "monotone": prof.monotone_flag,
        "limit": pm_bracket(prof.limit_estimate) if prof.limit_estimate else None,
        "limit_is_analytic": prof.limit_is_analytic,
        "notes": list(prof.notes),
    }
    lines = [f"{'n':>4}  {'p_n':>20}  {'q_n':>20}"]
    lines += [f"{n:>4}  {_num(prof.p_at(n)):>20}  {(_num(prof.q_at(n)) if n >= 2 else '-'):>20}"
              for n in range(1, args.n_max + 1)]
    lines.append(f"monotone: {prof.monotone_flag}")
    return Outcome(EXIT_OK, rows if cfg.fmt == "csv" else data, "\n".join(lines), ["n", "p_n", "q_n"])


def _hutchinson_json(rep: HutchinsonReport) -> dict:
    def piece(p):
        return {"m": p.m, "n": p.n, "Z_c": p.Z_c, "nonpositive": p.nonpositive, "simple_negative": p.negative_simple}

    return {
        "N": rep.N,
        "q_min": pm(rep.q_min),
        "q_condition": rep.q_condition,
        "first_failure": rep.first_failure,
        "sections_real_rooted": rep.sections_real_rooted,
        "consecutive_terms_nonpositive": rep.pieces_nonpositive,
        "all_simple_negative": rep.all_simple_negative,
        "sections": [piece(p) for p in rep.sections],
        "pieces": [piece(p) for p in rep.pieces],
        "exhibit": piece(rep.exhibit) if rep.exhibit else None,
    }


def cmd_hutchinson(args, cfg: RunConfig) -> Outcome:
    src = _rule_or_series(args, args.N)
    rep = hutchinson_check(src, args.N, args.span)
    rows = [[p.m, p.n, p.Z_c, int(p.nonpositive), int(p.negative_simple)] for p in rep.sections + rep.pieces]
    if rep.q_condition:
        text = (f"q_n >= 4 for n <= {rep.N}; {len(rep.sections)} sections and {len(rep.pieces)} "
                f"consecutive-term polynomials: real nonpositive zeros = {rep.pieces_nonpositive}, "
                f"all simple negative = {rep.all_simple_negative}")
    else:
        text = f"q_{rep.first_failure} < 4 (min q = {_num(rep.q_min)})"
        if rep.exhibit:
            text += f"; S_{rep.exhibit.n} has Z_c = {rep.exhibit.Z_c}"
    data = rows if cfg.fmt == "csv" else _hutchinson_json(rep)
    return Outcome(EXIT_OK, data, text, ["m", "n", "Z_c", "nonpositive", "simple_negative"])


def cmd_sturm(args, cfg: RunConfig) -> Outcome:
    p = _poly(args)
    rep = hyperbolicity_report(p)
    rows = [[pm(b.lo), pm(b.hi), b.multiplicity] for b in rep.brackets]
    data = {
        "degree": rep.degree, "Z_c": rep.Z_c, "real_roots": rep.real_root_count,
        "hyperbolic": rep.hyperbolic, "all_negative": rep.all_negative, "all_simple": rep.all_simple,
        "brackets": [{"lo": format_exact(b.lo), "hi": format_exact(b.hi), "multiplicity": b.multiplicity}
                     for b in rep.brackets],
    }
    text = (f"degree {rep.degree}, Z_c = {rep.Z_c}, real zeros {rep.real_root_count} "
            f"({len(rep.brackets)} distinct), hyperbolic = {rep.hyperbolic}")
    return Outcome(EXIT_OK, rows if cfg.fmt == "csv" else data, text, ["lo", "hi", "multiplicity"])


def _gamma(args, n: int) -> list[Fraction]:
    if args.gamma:
        return [to_fraction(g) for g in args.gamma.split(",") if g.strip()]
    if args.gamma_kind == "theta":
        return [Fraction(1, 2 ** (k * k)) for k in range(n + 1)]
    return [Fraction(1, math.factorial(k)) for k in range(n + 1)]


def cmd_czds(args, cfg: RunConfig) -> Outcome:
    p = _poly(args)
    res = czds_check(_gamma(args, p.degree), p)
    data = {"Z_c_before": res.before, "Z_c_after": res.after, "satisfied": res.satisfied}
    return Outcome(EXIT_OK, [[res.before, res.after, int(res.satisfied)]] if cfg.fmt == "csv" else data,
                   f"Z_c {res.before} -> {res.after}; non-increasing = {res.satisfied}",
                   ["Z_c_before", "Z_c_after", "satisfied"])


def cmd_theta(args, cfg: RunConfig) -> Outcome:
    if args.theta_cmd == "eval":
        params = ThetaParams.from_a2(to_fraction(args.a2))
        v = theta_eval(params, to_fraction(args.x), tol=cfg.tol)
        return Outcome(EXIT_OK, {"a2": args.a2, "x": args.x, "value": pm_bracket(v)},
                       f"g_a({args.x}) = {pm_bracket(v)}", None)
    if args.theta_cmd == "cn":
        consts = compute_cn_sweep(args.n, cfg.tol, args.method, cfg.jobs)
        if cfg.fmt == "csv":
            return Outcome(EXIT_OK, None, cn_table_csv(consts), None)
        data = {"tolerance": pm(cfg.tol), "constants": [
            {"n": c.n, "c_n": pm_bracket(c.c_n), "method": c.method, "agreement": c.agreement} for c in consts]}
        text = "\n".join(f"c_{c.n} = {pm_bracket(c.c_n)}  [{float(c.c_n.lo):.10f}, {float(c.c_n.hi):.10f}]"
                         for c in consts)
        return Outcome(EXIT_OK, data, text, None)
    if args.theta_cmd == "qinf":
        q = estimate_qinf(args.n_max, cfg.tol, cfg.jobs)
        b = q.bracket
        data = {"n_max": args.n_max, "tolerance": pm(cfg.tol), "qinf": pm_bracket(b),
                "odd": {"n": q.odd.n, "c_n": pm_bracket(q.odd.c_n)},
                "even": {"n": q.even.n, "c_n": pm_bracket(q.even.c_n)}}
        text = (f"q_inf in [{float(b.lo):.12f}, {float(b.hi):.12f}] "
                f"(c_{q.odd.n} <= q_inf <= c_{q.even.n}, width {float(b.width):.2e})")
        return Outcome(EXIT_OK, data, text, None)
    pts = spectrum(args.k_max, cfg.tol)
    if cfg.fmt == "csv":
        return Outcome(EXIT_OK, None, spectrum_csv(pts), None)
    data = {"points": [{"k": p.k, "a_tilde": pm_bracket(p.a_tilde), "a_tilde_sq": pm_bracket(p.a2),
                        "double_root": pm_bracket(p.double_root_location), "certified": p.certified}
                       for p in pts]}
    text = "\n".join(f"a~_{p.k} = {float(p.a_tilde.mid):.12f}  a~^2 = {float(p.a2.mid):.12f}  "
                     f"double zero near {float(p.double_root_location.mid):.6f}  certified = {p.certified}"
                     for p in pts)
    status = EXIT_OK if all(p.certified for p in pts) else EXIT_INCONCLUSIVE
    return Outcome(status, data, text, None)


def cmd_certify(args, cfg: RunConfig) -> Outcome:
    src = _rule_or_series(args)
    res = certify_not_lp(src, oracle=not args.no_oracle)
    if res.certificate is not None:
        data = certificate_to_json(res.certificate)
        c = res.certificate
        text = (f"NOT_IN_LP: certificate issued (m = {c.positivity.m}, Rouche margin {_num(c.rouche_margin)}, "
                f"apolarity residual {c.grace.residual})")
        return Outcome(EXIT_OK, data, text, None)
    data = {"conclusion": res.verdict, "reason": res.reason, "hypothesis": res.hypothesis}
    status = EXIT_OK if res.verdict == NOT_IN_LP else EXIT_INCONCLUSIVE
    return Outcome(status, data, f"{res.verdict}: {res.reason}", None)


def cmd_verify(args, cfg: RunConfig) -> Outcome:
    try:
        obj = json.loads(Path(args.certificate).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as e:
        raise SeriesError(f"cannot read certificate: {e}") from e
    rep = verify_certificate(obj, winding=not args.no_winding)
    data = {"verified": rep.ok, "checks": [{"name": n, "passed": ok, "detail": d} for n, ok, d in rep.checks]}
    text = "\n".join(rep.lines() + [f"certificate {'VERIFIED' if rep.ok else 'NOT VERIFIED'}"])
    return Outcome(EXIT_OK if rep.ok else EXIT_INCONCLUSIVE, data, text, None)


def cmd_classify(args, cfg: RunConfig) -> Outcome:
    src = _rule_or_series(args)
    res = classify(src)
    data = {"verdict": res.verdict, "branch": res.branch, "reason": res.reason, "notes": list(res.notes)}
    text = f"{res.verdict} via {res.branch}: {res.reason}" + "".join(f"\n  note: {n}" for n in res.notes)
    return Outcome(EXIT_INCONCLUSIVE if res.verdict == INCONCLUSIVE else EXIT_OK, data, text, None)


# -- reproduction of the headline constants -------------------------------------------------------------


@dataclass(frozen=True)
class ReproRow:
    name: str
    expected: str
    obtained: str
    tolerance: str
    passed: bool


def _near(b: Bracket, x: Fraction, tol: Fraction) -> bool:
    return b.lo - tol <= x <= b.hi + tol


def reproduce_rows(n_max: int = 20, qinf_tol: Fraction = Fraction(1, 10**6), jobs: int = 1) -> list[ReproRow]:
    rows: list[ReproRow] = []
    six = Fraction(1, 10**6)
    c2, c3 = compute_cn_sweep([2, 3], DEFAULT_TOL, jobs=jobs)
    rows.append(ReproRow("c_2", "4", pm_bracket(c2.c_n), "1e-6", _near(c2.c_n, Fraction(4), six)))
    rows.append(ReproRow("c_3", "3", pm_bracket(c3.c_n), "1e-6", _near(c3.c_n, Fraction(3), six)))
    q = estimate_qinf(n_max, qinf_tol, jobs).bracket
    target = Fraction("3.23363666")
    ok = _near(q, target, Fraction(1, 10**4)) and q.width <= Fraction(1, 10**3)
    rows.append(ReproRow(f"q_inf (n_max={n_max})", "3.23363666", pm_bracket(q), "1e-4", ok))
    tight = estimate_qinf(n_max, DEFAULT_TOL, jobs).bracket
    rows.append(ReproRow("q_inf tight bracket nested", "inside the row above", pm_bracket(tight), "1e-9",
                         q.lo <= tight.lo and tight.hi <= q.hi))
    a1 = spectrum(1)[0]
    rows.append(ReproRow("a~_1^2 vs q_inf", pm_bracket(tight), pm_bracket(a1.a2), "1e-6",
                         a1.a2.overlaps(tight, six) and a1.certified))
    examples = [
        ("classify q = 4", QuotientRule.constant(4), IN_LP),
        ("classify q_n = 3.5 + 1/n", QuotientRule.limit_increasing("3.5", "-1"), IN_LP),
        ("classify q_n = 3.2 - 0.2/n", QuotientRule.limit_increasing("3.2", "0.2"), NOT_IN_LP),
    ]
    for name, rule, want in examples:
        got = classify(rule).verdict
        rows.append(ReproRow(name, want, got, "exact", got == want))
    return rows


def cmd_reproduce(args, cfg: RunConfig) -> Outcome:
    rows = reproduce_rows(args.n_max, to_fraction(args.qinf_tol), cfg.jobs)
    table = [[r.name, r.expected, r.obtained, r.tolerance, "PASS" if r.passed else "FAIL"] for r in rows]
    w = max(len(r.name) for r in rows)
    lines = [f"{r.name:<{w}}  {'PASS' if r.passed else 'FAIL'}  expected {r.expected}  got {r.obtained}  "
             f"(tol {r.tolerance})" for r in rows]
    failed = [r.name for r in rows if not r.passed]
    lines.append("all checks passed" if not failed else "FAILED: " + ", ".join(failed))
    data = {"rows": [{"name": r.name, "expected": r.expected, "obtained": r.obtained,
                      "tolerance": r.tolerance, "passed": r.passed} for r in rows], "failed": failed}
    return Outcome(EXIT_FAILED if failed else EXIT_OK, table if cfg.fmt == "csv" else data, "\n".join(lines),
                   ["check", "expected", "obtained", "tolerance", "result"])


# -- argument parsing ------------------------------------------------------------------------------------


def _global_flags(suppress: bool) -> argparse.ArgumentParser:
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--tol", default=d("1e-9"), help="bisection / enclosure tolerance (default 1e-9)")
    p.add_argument("--format", dest="fmt", choices=["json", "csv", "text"], default=d("text"))
    p.add_argument("--out", type=Path, default=d(None), help="write the artifact here (plus a .meta.json sidecar)")
    p.add_argument("--jobs", type=int, default=d(1), help="worker processes for independent sub-computations")
    return p


def _input_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--file", help="coefficient file ('k value' lines) or JSON rule file")
    p.add_argument("--rule", help='inline rule, e.g. \'{"type":"limit-increasing","c":3.2,"d":0.2}\'')


def build_parser() -> argparse.ArgumentParser:
    g = _global_flags(suppress=True)
    parser = argparse.ArgumentParser(prog="lpcert", parents=[_global_flags(suppress=False)],
                                     description="Certified real-rootedness and Laguerre-Polya membership tools.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("quotients", parents=[g], help="second quotients q_n and ratios p_n")
    _input_flags(p)
    p.add_argument("--n-max", type=int, default=20)
    p.set_defaults(func=cmd_quotients)

    p = sub.add_parser("hutchinson", parents=[g], help="q_n >= 4 test with consecutive-term zero census")
    _input_flags(p)
    p.add_argument("--N", type=int, default=8)
    p.add_argument("--span", type=int, default=8, help="largest n - m for sub-polynomials")
    p.set_defaults(func=cmd_hutchinson)

    for name, fn, hlp in (("sturm", cmd_sturm, "exact real-root census"),
                          ("czds", cmd_czds, "Z_c before and after a termwise multiplier")):
        p = sub.add_parser(name, parents=[g], help=hlp)
        p.add_argument("--coeffs", help="inline coefficients c0,c1,... (low to high)")
        p.add_argument("--file", help="coefficient file")
        if name == "czds":
            p.add_argument("--gamma", help="multiplier sequence g0,g1,...")
            p.add_argument("--gamma-kind", choices=["theta", "factorial"], default="theta",
                           help="built-in sequence 2^(-k^2) or 1/k! (default theta)")
        p.set_defaults(func=fn)

    p = sub.add_parser("theta", parents=[g], help="partial theta function tools")
    tsub = p.add_subparsers(dest="theta_cmd", required=True)
    t = tsub.add_parser("eval", parents=[g])
    t.add_argument("--a2", required=True)
    t.add_argument("--x", required=True)
    t = tsub.add_parser("cn", parents=[g])
    t.add_argument("--n", type=int, nargs="+", required=True)
    t.add_argument("--method", default="auto", choices=["auto", "both", "sturm-bisection", "criterion-bisection"])
    t = tsub.add_parser("qinf", parents=[g])
    t.add_argument("--n-max", type=int, default=20)
    t = tsub.add_parser("spectrum", parents=[g])
    t.add_argument("--k-max", type=int, default=3)
    p.set_defaults(func=cmd_theta)

    p = sub.add_parser("certify", parents=[g], help="issue a non-membership certificate")
    _input_flags(p)
    p.add_argument("--no-oracle", action="store_true", help="skip the companion-matrix cross-check")
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("verify", parents=[g], help="re-check a certificate JSON without searching")
    p.add_argument("certificate")
    p.add_argument("--no-winding", action="store_true")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("classify", parents=[g], help="IN_LP / NOT_IN_LP / INCONCLUSIVE with reason")
    _input_flags(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("reproduce", parents=[g], help="recompute the headline constants and examples")
    p.add_argument("--n-max", type=int, default=20)
    p.add_argument("--qinf-tol", default="1e-6", help="bisection tolerance for the reported q_inf bracket")
    p.set_defaults(func=cmd_reproduce)
    return parser


def _budgets(args) -> dict[str, int]:
    return {k: v for k, v in vars(args).items() if k in ("n_max", "N", "k_max", "span") and v is not None}


def run(argv: Optional[Sequence[str]] = None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_INPUT
    started = time.time()
    try:
        cfg = RunConfig(args.command, getattr(args, "file", None) or getattr(args, "rule", None),
                        to_fraction(args.tol), _budgets(args), args.fmt, args.out, args.jobs)
        for key in ("n_max", "N", "k_max"):
            if getattr(args, key, 1) is not None and getattr(args, key, 1) < 1:
                raise SeriesError(f"--{key.replace('_', '-')} must be positive")
        outcome = args.func(args, cfg)
        text = render(outcome, cfg.fmt)
    except (SeriesError, ValueError, OSError, KeyError) as e:
        print(f"lpcert: input error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except PrecisionCapError as e:
        print(f"lpcert: precision cap reached: {e}", file=sys.stderr)
        return EXIT_PRECISION
    except Undecidable as e:
        print(f"lpcert: inconclusive: {e}", file=sys.stderr)
        return EXIT_INCONCLUSIVE
    if cfg.out is not None:
        cfg.out.write_text(text, encoding="utf-8")
        meta = {
            "argv": list(argv) if argv is not None else sys.argv[1:],
            "command": cfg.command,
            "exit_status": outcome.status,
            "finished_utc": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
            "python": platform.python_version(),
            "runtime_seconds": round(time.time() - started, 3),
            "version": __version__,
        }
        cfg.out.with_name(cfg.out.name + ".meta.json").write_text(dumps(meta), encoding="utf-8")
    else:
        stdout.write(text)
    return outcome.status


def main() -> None:
    sys.exit(run())
