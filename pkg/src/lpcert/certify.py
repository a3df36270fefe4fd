"""Laguerre-Polya non-membership certificates, Hutchinson's test and a classifier.

Series are handled in normalized form a_0 = a_1 = 1, where

    phi(x) = sum (-1)^k a_k x^k,   a_k = 1 / (q_2^(k-1) q_3^(k-2) ... q_k),

and p_k = q_2 q_3 ... q_k is the ratio a_(k-1)/a_k.  Rescaling f(z) to
f(lambda z)/a_0 changes neither the quotients nor membership.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence, Union

import numpy as np
from gmpy2 import mpq

from .cover import Cover, NonPositivePoint, PrecisionCapError, SeriesTarget, certify_positive
from .interval import Bracket
from .poly import RealPolynomial, squarefree_decomposition
from .roots import companion_roots, hyperbolicity_report, nonreal_count, oracle_real_count, sturm_count
from .series import CoefficientSeries, QuotientRule, SeriesError, quotients
from .theta import alternating_coeffs, criterion_decide, qinf_bracket
from .winding import CircleFunction, WindingInconclusive, winding_details

IN_LP = "IN_LP"
NOT_IN_LP = "NOT_IN_LP"
INCONCLUSIVE = "INCONCLUSIVE"

M_CAP = 2**12
ORACLE_DEGREE = 60
TAIL_TARGET = Fraction(1, 10**40)
_U = 2.0**-53


class HypothesisError(ValueError):
    """A hypothesis of the non-membership pipeline is violated or undecidable."""

    def __init__(self, hypothesis: str, message: str):
        super().__init__(f"{hypothesis}: {message}")
        self.hypothesis = hypothesis


# -- normalized coefficients ------------------------------------------------------------


QSource = Union[QuotientRule, Callable[[int], Fraction]]


def _q_fn(source: QSource) -> Callable[[int], Fraction]:
    return source.q_at if isinstance(source, QuotientRule) else source


def phi_magnitudes(source: QSource, n: int) -> list[Fraction]:
    """a_0..a_n of the normalized series (all positive)."""
    q = _q_fn(source)
    out = [Fraction(1), Fraction(1)][: n + 1]
    a, p = Fraction(1), Fraction(1)
    for k in range(2, n + 1):
        p *= q(k)
        a /= p
        out.append(a)
    return out


def phi_coeffs(source: QSource, n: int) -> list[Fraction]:
    return [a if k % 2 == 0 else -a for k, a in enumerate(phi_magnitudes(source, n))]


def s4_coeffs(q2, q3, q4) -> list[Fraction]:
    q2, q3, q4 = Fraction(q2), Fraction(q3), Fraction(q4)
    return phi_coeffs({2: q2, 3: q3, 4: q4}.__getitem__, 4)


def _ratio_p(source: QSource, k: int) -> Fraction:
    """p_k = q_2 ... q_k."""
    q = _q_fn(source)
    p = Fraction(1)
    for i in range(2, k + 1):
        p *= q(i)
    return p


def phi_truncation(source: QSource, X: Fraction, target: Fraction = TAIL_TARGET):
    """(K, coefficients of phi through degree K, tail callback valid on [0, X]).

    Beyond K every term ratio x/p_(k+1) is at most 1/4 on [0, X] (p_k grows
    with k when all quotients exceed 1), so the tail and its derivative are
    bounded by 2 a_(K+1) X^(K+1) and 2 (K+1) a_(K+1) X^K.
    """
    X = Fraction(X)
    q = _q_fn(source)
    mags = [Fraction(1), Fraction(1)]
    p = Fraction(1)
    K = 1
    while True:
        p_next = p * q(K + 1)
        a_next = mags[K] / p_next
        p_after = p_next * q(K + 2)
        t0 = 2 * a_next * X ** (K + 1)
        t1 = 2 * (K + 1) * a_next * X**K
        if K >= 4 and X / p_after <= Fraction(1, 4) and max(t0, t1) < target:
            break
        mags.append(a_next)
        p = p_next
        K += 1
    a_tail = a_next

    def tail(xmax: Fraction) -> tuple[Fraction, Fraction]:
        xmax = Fraction(xmax)
        if xmax > X:
            raise ValueError(f"tail bound valid up to {X}, asked for {xmax}")
        return 2 * a_tail * xmax ** (K + 1), 2 * (K + 1) * a_tail * xmax**K

    coeffs = [a if k % 2 == 0 else -a for k, a in enumerate(mags)]
    return K, coeffs, tail


def phi_circle_function(source: QSource, radius: Fraction) -> CircleFunction:
    """phi on |z| = radius as truncation plus a bound on the remainder."""
    K, coeffs, tail = phi_truncation(source, radius)
    return CircleFunction(coeffs, tail(Fraction(radius))[0])


# -- lemma: q_2 floor ---------------------------------------------------------------------


@dataclass(frozen=True)
class LemmaQ2Floor:
    residual: Fraction  # a1^2 a2/a0^3 + 3 a1 a3/a0^2 - 4 a2^2/a0^2
    reduced: Fraction  # q3 (q2 - 4) + 3, same sign as the residual
    power_sum: Fraction  # (a1/a0)^2 - 2 a2/a0, the sum of inverse squared zeros
    q2: Fraction
    q3: Fraction
    verdict: str

    @property
    def q2_at_least_2(self) -> bool:
        return self.power_sum >= 0

    @property
    def boundary(self) -> bool:
        return self.reduced == 0

    @property
    def failure(self) -> str:
        if self.power_sum < 0:
            return f"power sum {self.power_sum} < 0 (q2 = {self.q2} < 2)"
        return f"residual {self.residual} < 0"


def lemma_q2_floor(a0, a1, a2, a3, increasing: bool = True) -> LemmaQ2Floor:
    """Necessary condition on the first four coefficients of a member of L-P.

    A negative residual (or power sum) rules membership out; otherwise the
    lemma is silent.  The verdict is only issued under the increasing-quotient
    hypothesis the caller vouches for.
    """
    a0, a1, a2, a3 = (Fraction(v) for v in (a0, a1, a2, a3))
    if min(a0, a1, a2, a3) <= 0:
        raise ValueError("lemma_q2_floor needs positive coefficients")
    residual = a1 * a1 * a2 / a0**3 + 3 * a1 * a3 / a0**2 - 4 * a2 * a2 / a0**2
    q2 = a1 * a1 / (a0 * a2)
    q3 = a2 * a2 / (a1 * a3)
    reduced = q3 * (q2 - 4) + 3
    power_sum = (a1 / a0) ** 2 - 2 * a2 / a0
    bad = residual < 0 or power_sum < 0
    return LemmaQ2Floor(residual, reduced, power_sum, q2, q3,
                        NOT_IN_LP if bad and increasing else INCONCLUSIVE)


# -- lemma: positivity on [0, q_2] --------------------------------------------------------


@dataclass(frozen=True)
class DominationRow:
    """Monotonicity of the k-th pair of terms when q_2..q_(2k+1) are raised to c."""

    k: int
    method: str  # "uniform": bound through q_i >= q_2; "exact": every j checked
    slack: Fraction  # min over j of rhs_j - q_2 (nonnegative when the row holds)

    @property
    def holds(self) -> bool:
        return self.slack >= 0


def _pair_exponents(k: int, j: int) -> tuple[int, int]:
    """Exponent of the merged variable in the two terms of pair k after merging q_2..q_j."""
    A = sum(2 * k + 1 - i for i in range(2, j + 1))
    return A, A + j - 1


def domination_row(q: Callable[[int], Fraction], k: int) -> DominationRow:
    q2 = q(2)
    ratios = [Fraction(*_pair_exponents(k, j)) for j in range(2, 2 * k + 2)]
    worst = min(ratios)
    uniform = worst * q2 ** (2 * k) - q2
    if uniform >= 0:
        return DominationRow(k, "uniform", uniform)
    qs = {i: q(i) for i in range(2, 2 * k + 2)}
    slack = None
    for j, r in zip(range(2, 2 * k + 2), ratios):
        rhs = r * qs[j] ** (j - 1)
        for i in range(j + 1, 2 * k + 2):
            rhs *= qs[i]
        d = rhs - q2
        slack = d if slack is None else min(slack, d)
    return DominationRow(k, "exact", slack)


@dataclass(frozen=True)
class PositivityWitness:
    """phi > 0 on [0, q_2], split as [0, 1], (1, q_2) and the end point q_2."""

    m: int
    c: Fraction
    q2: Fraction
    unit_ratio: Fraction  # bound on x/p_(k+1) over [0, 1]; < 1 makes terms decrease
    remainder_ratio: Fraction  # bound on x/p_(k+1), k >= 2, over (1, q_2]
    section_cover: Cover  # alternating theta section of degree 2m+1 at s = c on [1, c]
    section_deflation: tuple[int, int]
    domination: tuple[DominationRow, ...]
    endpoint_group: Fraction  # 1 - q_2/q_3
    endpoint_value: Bracket  # phi(q_2)
    direct_truncation: int
    direct_cover: Cover  # independent interval cover of phi on [0, q_2]

    @property
    def section_degree(self) -> int:
        return 2 * self.m + 1

    @property
    def holds(self) -> bool:
        return (self.unit_ratio < 1 and self.remainder_ratio < 1
                and all(r.holds for r in self.domination)
                and self.endpoint_group >= 0 and self.endpoint_value.lo > 0
                and self.section_cover.min_lower > 0 and self.direct_cover.min_lower > 0)


def section_target(c: Fraction, n: int, deflation: tuple[int, int]) -> SeriesTarget:
    """The alternating theta section at s = c, with exact end point zeros divided out."""
    coeffs = alternating_coeffs(c, n)
    m_lo, m_hi = deflation
    if not (m_lo or m_hi):
        return SeriesTarget(coeffs)
    p = RealPolynomial(coeffs)
    for e, m in ((Fraction(1), m_lo), (Fraction(c), m_hi)):
        for _ in range(m):
            p, r = p.divmod(RealPolynomial([-e, 1]))
            if not r.is_zero:
                raise ValueError(f"section has no zero of multiplicity {m} at {e}")
    return SeriesTarget(list((p * RealPolynomial([(-1) ** m_hi])).coeffs))


def positivity_on_segment(rule: QuotientRule, qinf: Optional[Bracket] = None,
                          m_cap: int = M_CAP) -> PositivityWitness:
    """Certify phi(x) > 0 for every x in [0, q_2]."""
    rule = rule.normalized()
    if rule.finite or rule.limit is None:
        raise HypothesisError("limit", "a quotient rule with an analytic limit is required")
    if not rule.increasing:
        raise HypothesisError("increasing", "quotients are not increasing")
    q = rule.q_at
    q2, q3, c = q(2), q(3), rule.limit
    if q2 < 2:
        raise HypothesisError("q2 >= 2", f"q_2 = {q2}")
    qinf = qinf if qinf is not None else qinf_bracket()
    if not c < qinf.lo:
        raise HypothesisError("c < q_inf", f"limit {c} is not below the q_inf bracket {qinf}")
    # the section of degree 2m+1 at s = c must be positive on (1, c)
    m = 1
    while True:
        out = criterion_decide(alternating_coeffs(c, 2 * m + 1), Fraction(1), c)
        if not out.found:
            break
        m *= 2
        if m > m_cap:
            raise HypothesisError("c < q_inf", f"no positive theta section up to degree {2 * m_cap + 1}")
    rows = tuple(domination_row(q, k) for k in range(1, m + 1))
    bad = [r.k for r in rows if not r.holds]
    if bad:
        raise HypothesisError("domination", f"pair monotonicity fails for k = {bad}")
    unit_ratio = 1 / q2
    remainder_ratio = 1 / q3  # x/p_(k+1) <= q_2/(q_2 q_3 ...) for k >= 2
    if not (unit_ratio < 1 and remainder_ratio < 1):
        raise HypothesisError("decreasing terms", "quotients must exceed 1")
    group = 1 - q2 / q3
    K, coeffs, tail = phi_truncation(rule, q2)
    target = SeriesTarget(coeffs, tail)
    value = target.point(q2)
    if group < 0 or value.lo <= 0:
        raise HypothesisError("endpoint", f"phi(q_2) is not certifiably positive ({float(value.lo)})")
    try:
        direct = certify_positive(target, Fraction(0), q2)
    except NonPositivePoint as e:
        raise HypothesisError("positivity", f"phi({e.point}) <= 0 contradicts the lemma") from e
    return PositivityWitness(m, c, q2, unit_ratio, remainder_ratio, out.cover, out.deflation,
                             rows, group, value, K, direct)


# -- lemma: minimum of |S_4| on the circle ------------------------------------------------


def chebyshev_t(d: int) -> RealPolynomial:
    a, b = RealPolynomial([1]), RealPolynomial([0, 1])
    if d == 0:
        return a
    for _ in range(d - 1):
        a, b = b, RealPolynomial([0, 2]) * b - a
    return b


def circle_modulus_squared(coeffs: Sequence[Fraction], r: Fraction) -> RealPolynomial:
    """H with |P(r e^{i theta})|^2 = H(cos theta) for real coefficients."""
    cs = [Fraction(c) for c in coeffs]
    n = len(cs) - 1
    H = RealPolynomial([sum(c * c * r ** (2 * j) for j, c in enumerate(cs))])
    for d in range(1, n + 1):
        w = 2 * sum(cs[j] * cs[j + d] * r ** (2 * j + d) for j in range(n - d + 1))
        H = H + chebyshev_t(d) * RealPolynomial([w])
    return H


def nonnegative_on(p: RealPolynomial, lo: Fraction, hi: Fraction) -> bool:
    """Exact test of p >= 0 on [lo, hi]: no sign change inside and a nonnegative probe."""
    if p.is_zero:
        return True
    for f, mult in squarefree_decomposition(p):
        if mult % 2 and sturm_count(f, lo, hi) - (1 if f(hi) == 0 else 0) > 0:
            return False
    probes = [lo, hi, (lo + hi) / 2, lo + (hi - lo) / 3]
    for x in probes:
        v = p(x)
        if v != 0:
            return v > 0
    return True


@dataclass(frozen=True)
class CircleMinCheck:
    q2: Fraction
    q3: Fraction
    q4: Fraction
    bound: Fraction  # q_2 / (q_3^2 q_4)
    exact: bool  # |S_4|^2 - bound^2 >= 0 on the whole circle, by Sturm sequences
    sampled_min_sq: Fraction  # exact min of |S_4|^2 over rational mesh points on the circle
    mesh: int

    @property
    def sampled_min(self) -> float:
        return math.sqrt(self.sampled_min_sq)

    @property
    def holds(self) -> bool:
        return self.exact and self.sampled_min_sq >= self.bound * self.bound


def _check_circle_range(q2, q3, q4) -> tuple[Fraction, Fraction, Fraction]:
    q2, q3, q4 = Fraction(q2), Fraction(q3), Fraction(q4)
    if not (3 <= q2 < 4 and q2 <= q3 <= q4):
        raise ValueError(f"circle lemma needs 3 <= q2 < 4 and q2 <= q3 <= q4, got {q2}, {q3}, {q4}")
    return q2, q3, q4


def rational_circle_points(r: Fraction, mesh: int) -> list[tuple[Fraction, Fraction]]:
    """Exact points r (1 - t^2 + 2 i t) / (1 + t^2) of the circle, t near tan(theta/2) on a theta mesh."""
    r = mpq(r.numerator, r.denominator)
    pts = []
    for i in range(mesh):
        if 2 * i == mesh:
            pts.append((-r, mpq(0)))
            continue
        t = Fraction(math.tan(math.pi * i / mesh)).limit_denominator(2**24)
        t = mpq(t.numerator, t.denominator)
        d = 1 + t * t
        pts.append((r * (1 - t * t) / d, r * 2 * t / d))
    return pts


def _modulus_sq(coeffs: Sequence, z: tuple) -> Fraction:
    x, y = z
    re, im = mpq(0), mpq(0)
    for c in reversed(coeffs):
        re, im = re * x - im * y + c, re * y + im * x
    m = re * re + im * im
    return Fraction(int(m.numerator), int(m.denominator))


def s4_circle_min(q2, q3, q4, mesh: int = 1024) -> CircleMinCheck:
    """Lower bound for |S_4| on |z| = q_2, proved exactly and sampled at exact mesh points.

    The bound is attained when q_2 = q_3 = q_4, so the sampled route uses
    rational points of the circle instead of floating-point enclosures.
    """
    q2, q3, q4 = _check_circle_range(q2, q3, q4)
    coeffs = s4_coeffs(q2, q3, q4)
    bound = q2 / (q3 * q3 * q4)
    H = circle_modulus_squared(coeffs, q2)
    exact = nonnegative_on(H - RealPolynomial([bound * bound]), Fraction(-1), Fraction(1))
    exact_coeffs = [mpq(c.numerator, c.denominator) for c in coeffs]
    sampled = min(_modulus_sq(exact_coeffs, z) for z in rational_circle_points(q2, mesh))
    return CircleMinCheck(q2, q3, q4, bound, exact, sampled, mesh)


# -- lemma: the remainder R_5 on the circle -----------------------------------------------


def _mesh_moduli(coeffs: Sequence[Fraction], r: Fraction, mesh: int) -> tuple[np.ndarray, float]:
    """|P(r e^{i theta_j})| on an equispaced mesh with an a-priori float error bound."""
    cf = np.array([float(c) for c in coeffs], dtype=complex)
    theta = 2 * np.pi * np.arange(mesh) / mesh
    z = float(r) * np.exp(1j * theta)
    acc = np.zeros_like(z)
    for c in cf[::-1]:
        acc = acc * z + c
    n = len(coeffs) - 1
    rf = float(r)
    S = sum(abs(float(c)) * rf**k for k, c in enumerate(coeffs))
    M1 = sum(k * abs(float(c)) * rf ** (k - 1) for k, c in enumerate(coeffs) if k)
    err = 8 * (n + 2) * _U * S + M1 * rf * 8 * _U
    return np.abs(acc), err * (1 + 1e-6)


@dataclass(frozen=True)
class TailCheck:
    q2: Fraction
    q3: Fraction
    q4: Fraction
    bound: Fraction  # q_2 / (q_3^3 q_4^3 - q_3^2)
    sampled_max: float  # certified upper enclosure of max |R_5| over the mesh points
    mesh: int
    model: str  # quotients used beyond q_4

    @property
    def holds(self) -> bool:
        return self.sampled_max <= self.bound


def tail_bound_r5(q2, q3, q4, rule: Optional[QuotientRule] = None, mesh: int = 512) -> TailCheck:
    """Upper bound for |R_5| on |z| = q_2 and its check against a sampled evaluation.

    Without a rule the extremal continuation q_k = q_4 (k >= 5) is sampled;
    increasing quotients can only make the remainder smaller.
    """
    q2, q3, q4 = Fraction(q2), Fraction(q3), Fraction(q4)
    if not q2 <= q3 <= q4:
        raise ValueError("tail lemma needs q2 <= q3 <= q4")
    if q3 * q4**3 <= 1:
        raise ValueError("tail lemma needs q3 q4^3 > 1")
    bound = q2 / (q3**3 * q4**3 - q3 * q3)
    if rule is None:
        src = lambda k: {2: q2, 3: q3}.get(k, q4)  # noqa: E731
        model = "q_k = q_4 for k >= 5"
    else:
        rule = rule.normalized()
        if (rule.q_at(2), rule.q_at(3), rule.q_at(4)) != (q2, q3, q4):
            raise ValueError("rule does not match the given quotients")
        src = rule.q_at
        model = "rule"
    K, coeffs, tail = phi_truncation(src, q2)
    rem = [Fraction(0)] * 5 + coeffs[5:]
    mod, err = _mesh_moduli(rem, q2, mesh)
    t0 = tail(q2)[0]
    return TailCheck(q2, q3, q4, bound, float(mod.max()) + err + float(t0) * (1 + 1e-9), mesh, model)


def rouche_margin(q2, q3, q4) -> Fraction:
    q2, q3, q4 = Fraction(q2), Fraction(q3), Fraction(q4)
    return q2 / (q3 * q3 * q4) - q2 / (q3**3 * q4**3 - q3 * q3)


# -- lemma: an apolar partner for S_4 -------------------------------------------------------


@dataclass(frozen=True)
class GraceWitness:
    q2: Fraction
    b: tuple[Fraction, Fraction, Fraction, Fraction, Fraction]  # binomial-form coefficients of Q
    Q: RealPolynomial
    roots: tuple[Fraction, Fraction, Fraction, Fraction]
    residual: Fraction
    roots_in_disk: bool
    s4_inside: Optional[int]  # zeros of S_4 in |z| < q_2 (winding number)
    s4_arcs: int = 0

    @property
    def holds(self) -> bool:
        return self.residual == 0 and self.roots_in_disk and (self.s4_inside or 0) >= 1


def apolarity_residual(p: Sequence[Fraction], b: Sequence[Fraction]) -> Fraction:
    """sum (-1)^k C(n,k) alpha_k b_(n-k), with p = sum C(n,k) alpha_k z^k."""
    n = len(p) - 1
    alpha = [Fraction(c) / math.comb(n, k) for k, c in enumerate(p)]
    return sum((-1) ** k * math.comb(n, k) * alpha[k] * b[n - k] for k in range(n + 1))


def grace_apolar_witness(q2, q3, q4, winding: bool = True) -> GraceWitness:
    q2, q3, q4 = Fraction(q2), Fraction(q3), Fraction(q4)
    if q2 < 3:
        raise ValueError(f"q2 = {q2} < 3: the partner has a zero outside the disk of radius q2")
    b3 = (q2 - 6) / 2
    b2 = -q2 * (1 + b3)
    b = (Fraction(0), Fraction(0), b2, b3, Fraction(1))
    Q = RealPolynomial([math.comb(4, k) * bk for k, bk in enumerate(b)])
    roots = (Fraction(0), Fraction(0), q2, -3 * (q2 - 4))
    if RealPolynomial.from_roots(roots) != Q:
        raise ArithmeticError("apolar partner does not factor as expected")
    s4 = s4_coeffs(q2, q3, q4)
    residual = apolarity_residual(s4, b)
    inside, arcs = None, 0
    if winding:
        try:
            w = winding_details(CircleFunction(s4), q2)
            inside, arcs = w.count, w.arcs
        except WindingInconclusive:
            inside = None
    return GraceWitness(q2, b, Q, roots, residual, all(abs(z) <= q2 for z in roots), inside, arcs)


# -- numeric oracle ----------------------------------------------------------------------------


@dataclass(frozen=True)
class OracleCheck:
    degree: int
    nonreal: int  # Z_c of the truncation of f, companion matrix count
    pairs_in_disk: int  # nonreal pairs of phi's truncation with |z| < q_2

    @property
    def confirms(self) -> bool:
        return self.nonreal >= 2


def oracle_check(rule: QuotientRule, degree: int = ORACLE_DEGREE) -> OracleCheck:
    rule = rule.normalized()
    mags = phi_magnitudes(rule, degree)
    p = RealPolynomial(mags)
    zc = degree - oracle_real_count(p)
    q2 = float(rule.q_at(2))
    ev = companion_roots(phi_coeffs(rule, degree))
    pairs = sum(1 for z in ev if abs(z) < q2 and z.imag > 1e-9 * max(1.0, abs(z)))
    return OracleCheck(degree, zc, pairs)


# -- the certificate ----------------------------------------------------------------------------


@dataclass(frozen=True)
class NonMembershipCertificate:
    rule: QuotientRule
    q2: Fraction
    q3: Fraction
    q4: Fraction
    limit: Fraction
    qinf: Bracket
    lemma: LemmaQ2Floor
    positivity: PositivityWitness
    circle: CircleMinCheck
    tail: TailCheck
    rouche_margin: Fraction
    grace: GraceWitness
    phi_inside: Optional[int]  # zeros of phi in |z| < q_2 (winding, cross-check)
    oracle: Optional[OracleCheck]
    conclusion: str = NOT_IN_LP
    notes: tuple[str, ...] = ()

    @property
    def boundary(self) -> bool:
        return self.q2 == 3

    @property
    def valid(self) -> bool:
        return (self.rouche_margin > 0 and self.grace.holds and self.positivity.holds
                and self.circle.exact and self.conclusion == NOT_IN_LP)


@dataclass(frozen=True)
class CertifyResult:
    verdict: str
    reason: str
    hypothesis: Optional[str] = None  # name of the failing hypothesis
    certificate: Optional[NonMembershipCertificate] = None
    lemma: Optional[LemmaQ2Floor] = None


def _as_rule(obj) -> QuotientRule:
    if isinstance(obj, QuotientRule):
        return obj
    if isinstance(obj, CoefficientSeries):
        if obj.rule is not None:
            return obj.rule
        es = obj.entries
        if len(es) < 3:
            raise SeriesError("need at least a_0, a_1, a_2")
        prof = quotients(obj, len(es) - 1)
        return QuotientRule.from_list([prof.q_at(n) for n in range(2, len(es))], es[0], es[1])
    raise TypeError(f"cannot interpret {type(obj).__name__} as a quotient rule")


def certify_not_lp(source, qinf: Optional[Bracket] = None, oracle: bool = True,
                   m_cap: int = M_CAP) -> CertifyResult:
    """Run the full non-membership pipeline on a quotient rule (or rule-backed series)."""
    rule = _as_rule(source)
    if rule.finite:
        return CertifyResult(INCONCLUSIVE, "finite quotient data: the limit hypothesis cannot be checked "
                             "from a prefix", "limit")
    norm = rule.normalized()
    q2, q3, q4 = norm.q_at(2), norm.q_at(3), norm.q_at(4)
    c = norm.limit
    if not norm.increasing:
        return CertifyResult(INCONCLUSIVE, "quotients are not increasing", "increasing")
    lemma = lemma_q2_floor(1, 1, 1 / q2, 1 / (q2 * q2 * q3), increasing=True)
    qinf = qinf if qinf is not None else qinf_bracket()
    if not c < qinf.lo:
        where = "inside" if c <= qinf.hi else "above"
        return CertifyResult(INCONCLUSIVE, f"limit {c} is {where} the q_inf bracket {qinf}", "c < q_inf",
                             lemma=lemma)
    if lemma.verdict == NOT_IN_LP:
        return CertifyResult(NOT_IN_LP, f"q2 floor lemma: {lemma.failure}", lemma=lemma)
    if q2 < 3:
        return CertifyResult(INCONCLUSIVE, f"q2 = {q2} < 3 with a nonnegative lemma residual", "q2 >= 3",
                             lemma=lemma)
    notes = []
    if q2 == 3:
        notes.append("q2 = 3 is the boundary case of the q2 floor lemma")
    try:
        pos = positivity_on_segment(norm, qinf, m_cap)
    except HypothesisError as e:
        return CertifyResult(INCONCLUSIVE, str(e), e.hypothesis, lemma=lemma)
    except PrecisionCapError as e:
        return CertifyResult(INCONCLUSIVE, f"precision cap: {e}", "precision", lemma=lemma)
    circle = s4_circle_min(q2, q3, q4)
    tail = tail_bound_r5(q2, q3, q4, norm)
    margin = rouche_margin(q2, q3, q4)
    if margin <= 0 or not circle.exact:
        return CertifyResult(INCONCLUSIVE, f"Rouche margin {margin} not positive", "rouche", lemma=lemma)
    grace = grace_apolar_witness(q2, q3, q4)
    if not grace.holds:
        return CertifyResult(INCONCLUSIVE, "apolar witness failed", "grace", lemma=lemma)
    try:
        phi_inside = winding_details(phi_circle_function(norm, q2), q2).count
    except WindingInconclusive:
        phi_inside = None
    if phi_inside is not None and phi_inside != grace.s4_inside:
        notes.append(f"winding numbers differ: S_4 {grace.s4_inside}, phi {phi_inside}")
    orc = oracle_check(norm) if oracle else None
    if orc is not None and not orc.confirms:
        notes.append(f"numeric oracle sees no nonreal zeros at degree {orc.degree}")
    cert = NonMembershipCertificate(rule, q2, q3, q4, c, qinf, lemma, pos, circle, tail, margin, grace,
                                    phi_inside, orc, NOT_IN_LP, tuple(notes))
    return CertifyResult(NOT_IN_LP, "increasing quotients with limit below q_inf", certificate=cert, lemma=lemma)


# -- Hutchinson's test --------------------------------------------------------------------------


@dataclass(frozen=True)
class PieceReport:
    """Zero census of sum_{k=m}^{n} a_k z^k (the factor z^m is set aside)."""

    m: int
    n: int
    Z_c: int
    nonpositive: bool  # all zeros real and <= 0
    negative_simple: bool  # all zeros real, simple and < 0 (z^m counts as a zero when m > 0)


@dataclass(frozen=True)
class HutchinsonReport:
    N: int
    q_min: Fraction
    q_condition: bool  # q_n >= 4 for 2 <= n <= N
    first_failure: Optional[int]  # smallest n with q_n < 4
    sections: tuple[PieceReport, ...]
    pieces: tuple[PieceReport, ...]  # consecutive-term sub-polynomials with m >= 1
    exhibit: Optional[PieceReport] = None  # a section with nonreal zeros

    @property
    def sections_real_rooted(self) -> bool:
        return all(p.Z_c == 0 for p in self.sections)

    @property
    def pieces_nonpositive(self) -> bool:
        """Every checked consecutive-term polynomial (sections included) has real nonpositive zeros."""
        return all(p.nonpositive for p in self.sections + self.pieces)

    @property
    def all_simple_negative(self) -> bool:
        return all(p.negative_simple for p in self.sections + self.pieces)

    @property
    def passed(self) -> bool:
        return self.q_condition and self.pieces_nonpositive


def _piece(coeffs: Sequence[Fraction], m: int, n: int) -> PieceReport:
    p = RealPolynomial(coeffs[m: n + 1])
    rep = hyperbolicity_report(p)
    nonpos = rep.all_nonpositive
    simple = rep.all_simple and rep.all_negative
    return PieceReport(m, n, rep.Z_c, nonpos, simple)


def hutchinson_check(source, N: int, span: int = 8) -> HutchinsonReport:
    """Check q_n >= 4 and the consecutive-term zero conditions up to degree N.

    With the quotient condition met, every section S_n (n <= N) and every
    sub-polynomial sum_{k=m}^{n} a_k z^k with n - m <= span is analysed
    exactly.  Otherwise the first failing index is reported together with the
    first section that has nonreal zeros.
    """
    if N < 2:
        raise ValueError("hutchinson_check needs N >= 2")
    if isinstance(source, QuotientRule):
        from .series import series_from_rule

        series = series_from_rule(source, N)
    else:
        series = source.materialize(N) if source.max_index < N else source
    coeffs = list(series.entries[: N + 1])
    if len(coeffs) < N + 1:
        raise SeriesError(f"series has only {len(coeffs)} coefficients")
    qs = [coeffs[n - 1] ** 2 / (coeffs[n - 2] * coeffs[n]) for n in range(2, N + 1)]
    q_min = min(qs)
    failure = next((n for n, v in zip(range(2, N + 1), qs) if v < 4), None)
    if failure is None:
        sections = tuple(_piece(coeffs, 0, n) for n in range(1, N + 1))
        pieces = tuple(_piece(coeffs, m, n) for m in range(1, N) for n in range(m + 1, min(N, m + span) + 1))
        return HutchinsonReport(N, q_min, True, None, sections, pieces)
    sections = []
    exhibit = None
    for n in range(2, N + 1):
        Zc = nonreal_count(RealPolynomial(coeffs[: n + 1]))
        sections.append(PieceReport(0, n, Zc, Zc == 0, False))
        if Zc and exhibit is None:
            exhibit = sections[-1]
    return HutchinsonReport(N, q_min, False, failure, tuple(sections), (), exhibit)


# -- classifier ----------------------------------------------------------------------------------


@dataclass(frozen=True)
class Classification:
    verdict: str
    branch: str  # hutchinson, decreasing-limit, certificate, q2-floor, none
    reason: str
    notes: tuple[str, ...] = ()
    certificate: Optional[NonMembershipCertificate] = None


def _inf_q(rule: QuotientRule) -> Optional[Fraction]:
    """inf over n >= 2 of q_n (None when not known in closed form)."""
    if rule.kind == "constant":
        return rule.q
    if rule.kind == "list":
        return min(rule.qs)
    if rule.d >= 0:
        return rule.q_at(2)
    return rule.c


def classify(source, qinf: Optional[Bracket] = None, oracle: bool = False) -> Classification:
    """Decision tree over the three decision branches; INCONCLUSIVE is a value, not an error."""
    rule = _as_rule(source)
    qinf = qinf if qinf is not None else qinf_bracket()
    notes: list[str] = []
    inf_q = _inf_q(rule)
    if inf_q is not None and inf_q >= 4:
        if rule.finite:
            poly = RealPolynomial(phi_magnitudes(rule.normalized(), len(rule.qs) + 1))
            if nonreal_count(poly) != 0:  # pragma: no cover - contradicts Hutchinson's theorem
                raise ArithmeticError("Sturm cross-check disagrees with the quotient test")
            notes.append("exact Sturm cross-check: polynomial is real-rooted")
        return Classification(IN_LP, "hutchinson", f"q_n >= 4 for all n (inf {inf_q})", tuple(notes))
    c = rule.limit
    if rule.finite:
        poly = RealPolynomial(phi_magnitudes(rule.normalized(), len(rule.qs) + 1))
        notes.append(f"finite polynomial: exact Z_c = {nonreal_count(poly)}")
        return Classification(INCONCLUSIVE, "none", "finite data outside the q >= 4 branch", tuple(notes))
    if rule.decreasing and c >= qinf.hi:
        return Classification(IN_LP, "decreasing-limit", f"decreasing quotients with limit {c} >= q_inf")
    if rule.increasing and c < qinf.lo:
        res = certify_not_lp(rule, qinf, oracle=oracle)
        if res.verdict == NOT_IN_LP:
            branch = "certificate" if res.certificate is not None else "q2-floor"
            return Classification(NOT_IN_LP, branch, res.reason, (), res.certificate)
        notes.append(f"certificate failed: {res.reason}")
    if c is not None and qinf.lo <= c <= qinf.hi:
        notes.append(f"limit {c} lies inside the q_inf bracket {qinf}")
    elif c is not None and c < qinf.lo:
        notes.append("lim inf q_n < q_inf: infinitely many sections fail to be real-rooted")
    return Classification(INCONCLUSIVE, "none", "no decision branch applies", tuple(notes))
