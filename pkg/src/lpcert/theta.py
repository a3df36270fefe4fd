"""The partial theta function g_a(z) = sum_j z^j a^(-j^2), a > 1.

Most of the work happens in the rescaled variable u = -z / a with s = a^2:

    g_a(-a u) = sum_j (-1)^j u^j s^(-j(j-1)/2),

whose truncations have rational coefficients whenever s is rational.  Real
zeros of a section of g_a on (-a^3, -a) correspond to u in (1, s), and a
section is real-rooted exactly when its rescaled alternating form is.
"""
from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Optional, Sequence

import numpy as np

from .cover import Cover, NonPositivePoint, PrecisionCapError, SeriesTarget, certify_positive
from .interval import Bracket, decimal_down, decimal_up, isqrt_bracket
from .poly import RealPolynomial
from .roots import companion_roots, is_real_rooted, sturm_count
from .winding import CircleFunction, WindingInconclusive, winding_number

DEFAULT_TOL = Fraction(1, 10**9)
PRECISION_CAP_BITS = 4096
EXACT_CROSSCHECK_MAX_N = 12

PrecisionError = PrecisionCapError


class Undecidable(RuntimeError):
    """The parameter lies inside the uncertainty bracket of a threshold."""


@dataclass(frozen=True)
class ThetaParams:
    """Parameter a > 1 as a rational enclosure, plus a^2 when it is exactly rational."""

    a: Bracket
    a2: Optional[Fraction] = None
    bits: int = 128

    def __post_init__(self):
        if self.a.lo <= 1 and not (self.a2 is not None and self.a2 > 1):
            raise ValueError("partial theta needs a > 1")
        if self.a2 is not None and self.a2 <= 1:
            raise ValueError("partial theta needs a^2 > 1")

    @classmethod
    def from_a2(cls, a2, bits: int = 128) -> "ThetaParams":
        a2 = Fraction(a2)
        if a2 <= 1:
            raise ValueError(f"a^2 = {a2} must exceed 1")
        return cls(isqrt_bracket(a2, bits), a2, bits)

    @classmethod
    def from_a(cls, a) -> "ThetaParams":
        if isinstance(a, Bracket):
            if a.lo == a.hi:
                return cls(a, a.lo * a.lo)
            return cls(a, None)
        a = Fraction(a)
        if a <= 1:
            raise ValueError(f"a = {a} must exceed 1")
        return cls(Bracket.point(a), a * a)

    @property
    def s(self) -> Bracket:
        """Enclosure of a^2."""
        if self.a2 is not None:
            return Bracket.point(self.a2)
        return Bracket(self.a.lo * self.a.lo, self.a.hi * self.a.hi)

    @property
    def a_exact(self) -> bool:
        return self.a.lo == self.a.hi

    def refined(self, bits: int) -> "ThetaParams":
        if self.a2 is None or self.a_exact:
            return self
        return ThetaParams(isqrt_bracket(self.a2, bits), self.a2, bits)


# -- evaluation -----------------------------------------------------------------


def _inv_a_power(params: ThetaParams, e: int) -> Bracket:
    """Enclosure of a^(-e) for e >= 0."""
    if params.a2 is not None:
        base = params.a2 ** -(e // 2)
        if e % 2 == 0:
            return Bracket.point(base)
        return Bracket(base / params.a.hi, base / params.a.lo)
    return Bracket(params.a.hi ** -e, params.a.lo ** -e)


def _mul(b: Bracket, x: Fraction) -> Bracket:
    return Bracket(b.lo * x, b.hi * x) if x >= 0 else Bracket(b.hi * x, b.lo * x)


def theta_eval(params: ThetaParams, x, tol=Fraction(1, 10**12), cap_bits: int = PRECISION_CAP_BITS) -> Bracket:
    """Certified enclosure of g_a(x), of width at most ``tol``."""
    x = Fraction(x)
    tol = Fraction(tol)
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    s_lo = params.s.lo
    ax = abs(x)
    # terms decrease geometrically from index J on once |x| s^-J <= 1/2
    J = 1
    while ax * s_lo ** -J > Fraction(1, 2):
        J += 1
    p = params
    while True:
        while 2 * ax ** (J + 1) * s_lo ** -(((J + 1) ** 2) // 2) > tol / 4:
            J += 1
        tail = 2 * ax ** (J + 1) * s_lo ** -(((J + 1) ** 2) // 2)
        lo = hi = Fraction(0)
        for j in range(J + 1):
            t = _mul(_inv_a_power(p, j * j), x**j)
            lo += t.lo
            hi += t.hi
        out = Bracket(lo - tail, hi + tail)
        if out.width <= tol:
            return out
        if p.a_exact or p.bits >= cap_bits or p.a2 is None:
            w = out.width
            exp10 = round((w.numerator.bit_length() - w.denominator.bit_length()) * math.log10(2))
            raise PrecisionError(f"g_a({x}) enclosure width about 1e{exp10} exceeds the tolerance at {p.bits} bits")
        p = p.refined(2 * p.bits)


def alternating_coeffs(s, n: int) -> list[Fraction]:
    """Coefficients of sum_{j<=n} (-1)^j u^j s^(-j(j-1)/2)."""
    s = Fraction(s)
    out = []
    c = Fraction(1)
    for j in range(n + 1):
        if j >= 2:
            c /= s ** (j - 1)
        out.append(c if j % 2 == 0 else -c)
    return out


def scaled_section(s, n: int) -> RealPolynomial:
    """S_n(-a u, g_a) as a polynomial in u, exact for rational s = a^2."""
    return RealPolynomial(alternating_coeffs(s, n))


@dataclass(frozen=True)
class IntervalPolynomial:
    """Polynomial whose coefficients are only known up to rational enclosures."""

    coeffs: tuple[Bracket, ...]

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1


def section_poly(params: ThetaParams, n: int):
    """S_n(z, g_a): a RealPolynomial when a is rational, else an IntervalPolynomial."""
    if n < 1:
        raise ValueError("section degree must be >= 1")
    if params.a_exact:
        a = params.a.lo
        return RealPolynomial([a ** -(j * j) for j in range(n + 1)])
    return IntervalPolynomial(tuple(_inv_a_power(params, j * j) for j in range(n + 1)))


# -- section membership -------------------------------------------------------------


@dataclass(frozen=True)
class SectionVerdict:
    n: int
    s: Fraction
    in_lp: bool
    witness_u: Optional[Fraction] = None  # u in (1, s) with alternating section <= 0
    cover: Optional[Cover] = None  # positivity cover of [1, s] when in_lp is False
    sturm: Optional[bool] = None  # exact real-rootedness of the section
    boundary: bool = False  # TRUE via a multiple zero at an end of the range

    @property
    def agrees(self) -> Optional[bool]:
        return None if self.sturm is None else self.sturm == self.in_lp

    def witness_x(self, params: ThetaParams) -> Optional[Bracket]:
        """The witness as a point of (-a^3, -a) in the original variable."""
        if self.witness_u is None:
            return None
        return Bracket(-params.a.hi * self.witness_u, -params.a.lo * self.witness_u)


def _golden_min(f: Callable[[float], float], lo: float, hi: float, iters: int = 80) -> float:
    g = (math.sqrt(5) - 1) / 2
    a, b = lo, hi
    c, d = b - g * (b - a), a + g * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(iters):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - g * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + g * (b - a)
            fd = f(d)
    return (a + b) / 2


def _witness_candidates(coeffs: Sequence[Fraction], lo: Fraction, hi: Fraction, grid: int = 257):
    """Rational points strictly inside (lo, hi) where a float search suggests the minimum lies."""
    cf = np.array([float(c) for c in coeffs][::-1])
    xs = np.linspace(float(lo), float(hi), grid)
    k = int(np.argmin(np.polyval(cf, xs[1:-1]))) + 1
    m = _golden_min(lambda t: float(np.polyval(cf, t)), xs[k - 1], xs[k + 1])
    for x in (Fraction(m), Fraction(xs[k])):
        for den in (1, 2, 4, 10, 100, 10**4, 10**8, None):
            y = x if den is None else x.limit_denominator(den)
            if lo < y < hi:
                yield y


def _endpoint_multiplicity(p: RealPolynomial, e: Fraction) -> tuple[RealPolynomial, int]:
    m = 0
    root = RealPolynomial([-e, 1])
    while not p.is_zero and p(e) == 0:
        p = p // root
        m += 1
    return p, m


def _interior_witness(target, e: Fraction, inward: int) -> Fraction:
    """A point near the endpoint e (moving inward) where the target is certainly <= 0."""
    step = Fraction(1, 2)
    for _ in range(200):
        u = e + inward * step
        if target.point(u).hi <= 0:
            return u
        step /= 2
    raise PrecisionError(f"no interior witness found near {e}")


@dataclass(frozen=True)
class CriterionOutcome:
    found: bool
    witness: Optional[Fraction] = None  # interior point with value <= 0
    cover: Optional[Cover] = None  # positivity cover (of the deflated form when deflated)
    boundary: bool = False  # decided by a multiple zero at an endpoint
    deflation: tuple[int, int] = (0, 0)  # multiplicities of exact zeros at lo and hi


def criterion_decide(coeffs: Sequence[Fraction], lo: Fraction, hi: Fraction,
                     tail: Optional[Callable] = None,
                     min_width: Fraction = Fraction(1, 2**80)) -> CriterionOutcome:
    """Is sum coeffs[k] u^k (+ tail) <= 0 somewhere in the open interval (lo, hi)?

    TRUE comes with an exact rational witness, FALSE with a positivity cover.
    For polynomials an exact zero at an endpoint is divided out first; a
    multiple zero there is the limiting (boundary) case and counts as TRUE,
    being the limit of interior nonpositive points.
    """
    lo, hi = Fraction(lo), Fraction(hi)
    target = SeriesTarget(coeffs, tail)
    for u in _witness_candidates(coeffs, lo, hi):
        if target.point(u).hi <= 0:
            return CriterionOutcome(True, u)
    m_lo = m_hi = 0
    reduced = target
    if tail is None:
        p = RealPolynomial(coeffs)
        q, m_lo = _endpoint_multiplicity(p, lo)
        q, m_hi = _endpoint_multiplicity(q, hi)
        if m_lo >= 2 or m_hi >= 2:
            return CriterionOutcome(True, hi if m_hi >= 2 else lo, boundary=True, deflation=(m_lo, m_hi))
        if m_lo or m_hi:
            # on (lo, hi) the factor (u - hi)^m_hi has sign (-1)^m_hi
            reduced = SeriesTarget(list((q * (-1) ** m_hi).coeffs))
    try:
        cover = certify_positive(reduced, lo, hi, min_width=min_width)
    except NonPositivePoint as e:
        u = e.point
        if u == lo:
            u = _interior_witness(target, lo, 1)
        elif u == hi:
            u = _interior_witness(target, hi, -1)
        return CriterionOutcome(True, u, deflation=(m_lo, m_hi))
    return CriterionOutcome(False, None, cover, deflation=(m_lo, m_hi))


def _section_in_lp_rational(s: Fraction, n: int, cross_check: bool) -> SectionVerdict:
    coeffs = alternating_coeffs(s, n)
    out = criterion_decide(coeffs, Fraction(1), s)
    sturm = is_real_rooted(RealPolynomial(coeffs)) if cross_check else None
    return SectionVerdict(n, s, out.found, out.witness, out.cover, sturm, out.boundary)


def section_in_lp(params: ThetaParams, n: int, cross_check: Optional[bool] = None) -> SectionVerdict:
    """Membership of S_n(., g_a) in L-P via a nonpositive point of the alternating form on [1, s].

    For rational a^2 the exact real-rootedness of the section is attached
    (by default for n <= 12).  When a^2 is only known as an interval, both
    endpoints are decided; membership is monotone in a^2, so agreement settles
    the question and disagreement is reported as a precision error.
    """
    if n < 2:
        raise ValueError("section_in_lp needs n >= 2")
    if cross_check is None:
        cross_check = n <= EXACT_CROSSCHECK_MAX_N
    if params.a2 is not None:
        return _section_in_lp_rational(params.a2, n, cross_check)
    s = params.s
    lo = _section_in_lp_rational(s.lo, n, cross_check)
    hi = _section_in_lp_rational(s.hi, n, cross_check)
    if lo.in_lp != hi.in_lp:
        raise PrecisionError(f"a^2 enclosure [{float(s.lo)}, {float(s.hi)}] straddles c_{n}")
    return lo


def sturm_section_in_lp(s, n: int) -> bool:
    return is_real_rooted(scaled_section(s, n))


# -- the constants c_n -------------------------------------------------------------------


@dataclass(frozen=True)
class ThetaSectionConstant:
    """c_n, the least a^2 for which the degree-n section is real-rooted: c_n in (lo, hi]."""

    n: int
    c_n: Bracket
    tolerance: Fraction
    method: str  # criterion-bisection | sturm-bisection | both
    agreement: bool = True
    criterion_bracket: Optional[Bracket] = None
    sturm_bracket: Optional[Bracket] = None
    steps: int = 0


def _bisect(pred: Callable[[Fraction], bool], lo: Fraction, hi: Fraction, tol: Fraction) -> tuple[Bracket, int]:
    steps = 0
    while hi - lo > tol:
        mid = (lo + hi) / 2
        if pred(mid):
            hi = mid
        else:
            lo = mid
        steps += 1
    return Bracket(lo, hi), steps


def _initial_bracket(pred: Callable[[Fraction], bool]) -> tuple[Fraction, Fraction]:
    hi = Fraction(4)
    while not pred(hi):
        hi *= 2
    lo = Fraction(2)
    while pred(lo):
        lo = (1 + lo) / 2
    return lo, hi


def compute_cn(n: int, tol=DEFAULT_TOL, method: str = "auto") -> ThetaSectionConstant:
    """Bracket c_n by bisection on a^2 over the section-membership predicate."""
    if n < 2:
        raise ValueError("c_n is defined for n >= 2")
    tol = Fraction(tol)
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    if method == "auto":
        method = "both" if n <= EXACT_CROSSCHECK_MAX_N else "sturm-bisection"
    criterion = lambda s: criterion_decide(alternating_coeffs(s, n), Fraction(1), s).found
    sturm = lambda s: sturm_section_in_lp(s, n)
    if method == "sturm-bisection":
        b, steps = _bisect(sturm, *_initial_bracket(sturm), tol)
        return ThetaSectionConstant(n, b, tol, method, True, None, b, steps)
    if method == "criterion-bisection":
        b, steps = _bisect(criterion, *_initial_bracket(criterion), tol)
        return ThetaSectionConstant(n, b, tol, method, True, b, None, steps)
    if method != "both":
        raise ValueError(f"unknown method {method!r}")
    # one pass while the predicates agree; split only on disagreement
    disagreements = []

    def joint(s: Fraction) -> bool:
        a, b = criterion(s), sturm(s)
        if a != b:
            disagreements.append(s)
        return b

    lo, hi = _initial_bracket(joint)
    b, steps = _bisect(joint, lo, hi, tol)
    if not disagreements:
        return ThetaSectionConstant(n, b, tol, method, True, b, b, steps)
    cb, _ = _bisect(criterion, *_initial_bracket(criterion), tol)
    agree = cb.overlaps(b)
    joined = Bracket(max(cb.lo, b.lo), min(cb.hi, b.hi)) if agree else b
    return ThetaSectionConstant(n, joined, tol, method, agree, cb, b, steps)


def _cn_job(args):
    n, tol, method = args
    return compute_cn(n, tol, method)


def compute_cn_sweep(ns: Sequence[int], tol=DEFAULT_TOL, method: str = "auto", jobs: int = 1) -> list[ThetaSectionConstant]:
    tasks = [(n, Fraction(tol), method) for n in ns]
    if jobs <= 1 or len(tasks) <= 1:
        return [_cn_job(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(_cn_job, tasks))


@dataclass(frozen=True)
class QInfBracket:
    """q_inf in [c_{2m+1}.lo, c_{2m}.hi]; odd constants increase and even ones decrease to q_inf."""

    bracket: Bracket
    m: int
    odd: ThetaSectionConstant
    even: ThetaSectionConstant


def estimate_qinf(n_max: int = 20, tol=DEFAULT_TOL, jobs: int = 1) -> QInfBracket:
    if n_max < 5:
        raise ValueError("estimate_qinf needs n_max >= 5")
    m = (n_max - 1) // 2
    even, odd = compute_cn_sweep([2 * m, 2 * m + 1], tol, jobs=jobs)
    if odd.c_n.lo > even.c_n.hi:
        raise ArithmeticError(f"c_{2*m+1} above c_{2*m}: interleaving violated")
    return QInfBracket(Bracket(odd.c_n.lo, even.c_n.hi), m, odd, even)


@lru_cache(maxsize=None)
def qinf_bracket(n_max: int = 20, tol: Fraction = DEFAULT_TOL) -> Bracket:
    """Cached certified bracket for q_inf used by the classifier and certifier."""
    return estimate_qinf(n_max, tol).bracket


# -- membership of g_a itself ----------------------------------------------------------------


def alternating_tail(s: Fraction, N: int) -> Callable[[Fraction], tuple[Fraction, Fraction]]:
    """Bounds on the tail sum_{j>N} (-1)^j u^j s^(-j(j-1)/2) and its u-derivative for 0 <= u <= U."""
    s = Fraction(s)

    def tail(U: Fraction) -> tuple[Fraction, Fraction]:
        U = Fraction(U)
        rho = U * s ** -(N + 1)
        if rho > Fraction(1, 4):
            raise PrecisionError(f"truncation N={N} too short for u up to {float(U)}")
        t0 = 2 * U ** (N + 1) * s ** -(N * (N + 1) // 2)
        t1 = 2 * (N + 1) * U**N * s ** -(N * (N + 1) // 2)
        return t0, t1

    return tail


def truncation_for(s: Fraction, U: Fraction, target: Fraction) -> int:
    """Smallest N whose alternating tail on [0, U] is below ``target``."""
    s, U = Fraction(s), Fraction(U)
    N = 2
    while True:
        if U * s ** -(N + 1) <= Fraction(1, 4):
            t0, t1 = alternating_tail(s, N)(U)
            if max(t0, t1) < target:
                return N
        N += 1


def nonpositive_point_check(params: ThetaParams, target: Fraction = Fraction(1, 10**30)) -> Optional[bool]:
    """Is g_a(x) <= 0 for some x in [-a^3, -a]?  None when undecided at the cap."""
    s = params.a2 if params.a2 is not None else params.s.lo
    N = truncation_for(s, s, target)
    try:
        out = criterion_decide(alternating_coeffs(s, N), Fraction(1), s,
                               tail=alternating_tail(s, N), min_width=Fraction(1, 2**50))
    except PrecisionError:
        return None
    return out.found


@dataclass(frozen=True)
class ThetaMembership:
    in_lp: bool
    a2: Bracket
    qinf: Bracket
    nonpositive_point: Optional[bool] = None


def theta_in_lp(params: ThetaParams, qinf: Optional[Bracket] = None, check_nonpositive_point: bool = False) -> ThetaMembership:
    """g_a is in L-P iff a^2 >= q_inf, decided against the certified bracket."""
    q = qinf if qinf is not None else qinf_bracket()
    s = params.s
    if s.lo >= q.hi:
        verdict = True
    elif s.hi < q.lo:
        verdict = False
    else:
        raise Undecidable(f"a^2 = {s} overlaps the q_inf bracket {q}")
    item = nonpositive_point_check(params) if check_nonpositive_point else None
    return ThetaMembership(verdict, s, q, item)


# -- spectrum -------------------------------------------------------------------------


@dataclass(frozen=True)
class SpectrumPoint:
    """a~_k: g_a has a double real zero, the rightmost of its real zeros."""

    k: int
    a_tilde: Bracket
    a2: Bracket
    double_root_location: Bracket  # the double zero in the original variable z
    double_root_u: Bracket  # same zero in the rescaled variable u = -z/a
    certified: bool
    note: str = ""


def _float_alt(s: float, N: int) -> np.ndarray:
    j = np.arange(N + 1)
    return ((-1.0) ** j) * np.exp(-0.5 * j * (j - 1) * math.log(s))


def _extrema(s: float, U: float = 80.0, N: int = 90) -> list[tuple[float, float, str]]:
    """Local extrema (u, G(u), kind) of the alternating function on (0, U]."""
    from scipy.optimize import brentq

    c = _float_alt(s, N)
    dc = np.polynomial.polynomial.polyder(c)
    ddc = np.polynomial.polynomial.polyder(dc)
    G = lambda u: np.polynomial.polynomial.polyval(u, c)
    dG = lambda u: np.polynomial.polynomial.polyval(u, dc)
    us = np.geomspace(0.05, U, 6000)
    d = dG(us)
    out = []
    for i in np.nonzero(np.sign(d[:-1]) * np.sign(d[1:]) < 0)[0]:
        r = brentq(dG, us[i], us[i + 1], xtol=1e-15)
        kind = "min" if np.polynomial.polynomial.polyval(r, ddc) > 0 else "max"
        out.append((r, float(G(r)), kind))
    return out


def _defects(s: float) -> list[tuple[float, float, str]]:
    """Extrema on the wrong side of zero: each one marks a lost pair of real zeros."""
    return [e for e in _extrema(s) if (e[2] == "min" and e[1] > 0) or (e[2] == "max" and e[1] < 0)]


def _locate_transitions(k_max: int, s_min: float = 1.02) -> list[tuple[float, float]]:
    """Coarse (s, u) positions where the defect count increases, scanning s downward."""
    grid = 1 + 3 * np.geomspace(1.0, (s_min - 1) / 3, 500)
    found: list[tuple[float, float]] = []
    prev_s, prev = float(grid[0]), len(_defects(float(grid[0])))
    for s in grid[1:]:
        cur = len(_defects(float(s)))
        if cur > prev:
            hi, lo = prev_s, float(s)
            for _ in range(40):
                mid = (hi + lo) / 2
                if len(_defects(mid)) > prev:
                    lo = mid
                else:
                    hi = mid
            new = min(_defects(lo), key=lambda e: abs(e[1]))
            found.append(((hi + lo) / 2, new[0]))
            if len(found) >= k_max:
                break
        prev_s, prev = float(s), cur
    return found


def _newton_double_root(s0: float, u0: float, dps: int = 50):
    import mpmath as mp

    with mp.workdps(dps):
        N = 120

        def F(s, u):
            g = gu = mp.mpf(0)
            for j in range(N + 1):
                c = (-1) ** j * s ** (-mp.mpf(j * (j - 1)) / 2)
                g += c * u**j
                if j:
                    gu += j * c * u ** (j - 1)
            return g, gu

        s, u = mp.findroot(F, (mp.mpf(s0), mp.mpf(u0)))
        return mp.mpf(s), mp.mpf(u)


def _ds_bound(u: Fraction, s_lo: Fraction, N: int) -> Fraction:
    """Bound on |dG/ds| at u over s >= s_lo (truncated part; the tail is covered separately)."""
    return sum(Fraction(j * (j - 1), 2) * u**j * s_lo ** -(j * (j - 1) // 2 + 1) for j in range(2, N + 1))


def _value(s: Fraction, N: int, u: Fraction) -> Bracket:
    return SeriesTarget(alternating_coeffs(s, N), alternating_tail(s, N)).point(u)


def _to_fraction(x) -> Fraction:
    if hasattr(x, "_mpf_"):  # mpmath real
        return Fraction(int(x.man)) * Fraction(2) ** int(x.exp) if x else Fraction(0)
    return Fraction(x)


def _dyadic(x, bits: int = 64) -> Fraction:
    return Fraction(round(_to_fraction(x) * 2**bits), 2**bits)


def verify_double_root(s_star, u_star, tol: Fraction, min_width=Fraction(1, 2**60)) -> tuple[Bracket, Bracket]:
    """Certify a parameter bracket [s_lo, s_hi] of width <= tol containing a double zero.

    With G(u; s) the alternating form, checks: G(u*; s_hi) < 0; G > 0 at
    u* +- r for every s in the bracket; G(.; s_lo) > 0 on [u* - r, u* + r];
    and G(.; s_hi) > 0 on [0, u* - r].  By continuity the window minimum of G
    reaches 0 at an interior point for some s in the bracket, which is then a
    double zero with no real zero to its right in the z variable.
    """
    tol = Fraction(tol)
    s_mid = _dyadic(s_star)
    u_mid = _dyadic(u_star, 40)
    delta = tol / 4
    s_lo, s_hi = s_mid - delta, s_mid + delta
    U = 2 * u_mid + 2
    N = truncation_for(s_lo, U, delta / 10**6)
    gs = float(_ds_bound(u_mid, s_lo, N))
    guu = abs(float(np.polynomial.polynomial.polyval(
        float(u_mid), np.polynomial.polynomial.polyder(_float_alt(float(s_mid), N), 2))))
    r = _dyadic(4 * math.sqrt(2 * float(delta) * gs / guu) + 1e-12, 60)
    if _value(s_hi, N, u_mid).hi >= 0:
        raise PrecisionError("window centre not negative at the upper parameter")
    for edge in (u_mid - r, u_mid + r):
        drift = _ds_bound(edge, s_lo, N) * (s_hi - s_lo)
        if _value(s_lo, N, edge).lo - drift <= 0:
            raise PrecisionError("window edge not positive across the parameter bracket")
    target = SeriesTarget(alternating_coeffs(s_lo, N), alternating_tail(s_lo, N))
    certify_positive(target, u_mid - r, u_mid + r, min_width=min_width)
    left = SeriesTarget(alternating_coeffs(s_hi, N), alternating_tail(s_hi, N))
    certify_positive(left, Fraction(0), u_mid - r, min_width=min_width)
    return Bracket(s_lo, s_hi), Bracket(u_mid - r, u_mid + r)


def _sqrt_bracket(b: Bracket, bits: int = 96) -> Bracket:
    return Bracket(isqrt_bracket(b.lo, bits).lo, isqrt_bracket(b.hi, bits).hi)


def spectrum(k_max: int, tol=DEFAULT_TOL) -> list[SpectrumPoint]:
    """Brackets for a~_1 > ... > a~_kmax, each certified by a sign-change argument."""
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    tol = Fraction(tol)
    out: list[SpectrumPoint] = []
    for k, (s0, u0) in enumerate(_locate_transitions(k_max), start=1):
        try:
            s_star, u_star = _newton_double_root(s0, u0)
            sb, ub = verify_double_root(s_star, u_star, tol)
            certified, note = True, ""
        except (PrecisionError, ZeroDivisionError, ValueError) as e:
            w = max(tol, Fraction(1, 10**6))
            sb = Bracket(_dyadic(s0) - w, _dyadic(s0) + w)
            ub = Bracket(_dyadic(u0) - Fraction(1, 100), _dyadic(u0) + Fraction(1, 100))
            certified, note = False, f"inconclusive: {e}"
        a = _sqrt_bracket(sb)
        z = Bracket(-a.hi * ub.hi, -a.lo * ub.lo)
        out.append(SpectrumPoint(k, a, sb, z, ub, certified, note))
    if len(out) < k_max:
        raise PrecisionError(f"only {len(out)} spectrum points located above a^2 = 1.02")
    return out


def complex_pairs_in_disk(s, degree: int = 40) -> tuple[int, Optional[int]]:
    """Nonreal zero pairs of the degree-N truncation inside |u| < s^((N+1)/2).

    Truncations are self-reciprocal up to scaling, so spurious pairs appear
    near the outer end of the zero range; the disk keeps to the part where the
    truncation tracks g_a.  Returns (companion-matrix count, exact count)
    where the exact count is (winding number - real zeros in the disk) / 2,
    or None if the winding number could not be certified.
    """
    s = Fraction(s)
    coeffs = alternating_coeffs(s, degree)
    # zeros sit near the powers s^j; put the circle halfway between two of them
    R = Fraction(float(s) ** ((degree + 1) / 2))
    ev = companion_roots(coeffs)
    numeric = sum(1 for z in ev if abs(z) < float(R) and z.imag > 1e-9 * max(1.0, abs(z)))
    exact = None
    try:
        scaled = [c * R**k for k, c in enumerate(coeffs)]
        inside = winding_number(CircleFunction(scaled), 1)
        p = RealPolynomial(coeffs)
        real = sturm_count(p, -R, R)
        exact = (inside - real) // 2 if (inside - real) % 2 == 0 else None
    except WindingInconclusive:
        exact = None
    return numeric, exact


# -- CSV emitters ---------------------------------------------------------------------


def cn_table_csv(constants: Sequence[ThetaSectionConstant]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "c_n_lo", "c_n_hi"])
    for c in constants:
        w.writerow([c.n, decimal_down(c.c_n.lo), decimal_up(c.c_n.hi)])
    return buf.getvalue()


def spectrum_csv(points: Sequence[SpectrumPoint]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["k", "a_tilde_lo", "a_tilde_hi"])
    for p in points:
        w.writerow([p.k, decimal_down(p.a_tilde.lo), decimal_up(p.a_tilde.hi)])
    return buf.getvalue()
