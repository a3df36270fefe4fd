"""Exact real-root counting and hyperbolicity certification.

Everything on the certification path is exact: Sturm chains are built from
primitive integer pseudo-remainders and evaluated at rational points by
homogenised integer Horner.  The companion-matrix routine at the bottom is a
floating-point *oracle* used only for cross-checks.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

import numpy as np

from gmpy2 import mpz

from .poly import RealPolynomial, _primitive, int_derivative, int_exact_div, int_prem, squarefree_decomposition

Endpoint = Union[Fraction, int, float, None]  # None / ±inf mean unbounded


class ZeroPolynomialError(ValueError):
    pass


def _sign(x) -> int:
    return (x > 0) - (x < 0)


def _raw_chain(a: list) -> list:
    chain = [a, _primitive(int_derivative(a))]
    while len(chain[-1]) > 1:
        r = int_prem(chain[-2], chain[-1])
        if not r:
            break
        chain.append([-c for c in r])
    return chain


def sturm_chain(p: RealPolynomial) -> list[list[int]]:
    """Sturm chain of the square-free part of p (integer coefficients).

    Each member is a positive multiple of the classical chain element, so sign
    variations are unchanged.  The remainder sequence ends in gcd(p, p'); when
    that is nonconstant the chain is rebuilt from p / gcd(p, p').
    """
    if p.is_zero:
        raise ZeroPolynomialError("Sturm chain of the zero polynomial")
    a = [mpz(c) for c in p.primitive_int()]
    if len(a) <= 1:
        return [a]
    chain = _raw_chain(a)
    if len(chain[-1]) > 1:
        g = [int(c) for c in chain[-1]]
        a = [mpz(c) for c in int_exact_div([int(c) for c in a], g)]
        chain = _raw_chain(a) if len(a) > 1 else [a]
    return chain


def _eval_sign(cs: Sequence[int], x: Endpoint) -> int:
    if x is None or x == math.inf:
        return _sign(cs[-1])
    if x == -math.inf:
        return _sign(cs[-1]) * (-1 if (len(cs) - 1) % 2 else 1)
    x = Fraction(x)
    n, d = x.numerator, x.denominator
    # sum c_k n^k d^(deg-k): same sign as P(n/d) because d > 0
    acc = 0
    dpow = 1
    for c in reversed(cs):
        acc = acc * n + c * dpow
        dpow *= d
    return _sign(acc)


def _variations(chain: list[list[int]], x: Endpoint) -> int:
    v = 0
    prev = 0
    for cs in chain:
        s = _eval_sign(cs, x)
        if s:
            if prev and s != prev:
                v += 1
            prev = s
    return v


def _normalize_endpoint(x: Endpoint, default: float) -> Endpoint:
    if x is None:
        return default
    if isinstance(x, float) and math.isinf(x):
        return x
    return Fraction(x)


def sturm_count(p: RealPolynomial, lo: Endpoint = None, hi: Endpoint = None,
                chain: Optional[list[list[int]]] = None) -> int:
    """Number of distinct real roots of p in (lo, hi].

    ``None`` (or ±inf) endpoints are unbounded.
    """
    if p.is_zero:
        raise ZeroPolynomialError("cannot count roots of the zero polynomial")
    lo = _normalize_endpoint(lo, -math.inf)
    hi = _normalize_endpoint(hi, math.inf)
    if lo != -math.inf and hi != math.inf and lo >= hi:
        return 0
    if chain is None:
        chain = sturm_chain(p)
    return _variations(chain, lo) - _variations(chain, hi)


def cauchy_bound(p: RealPolynomial) -> Fraction:
    """All complex roots satisfy |z| < bound."""
    lead = abs(p.lead)
    m = max((abs(c) for c in p.coeffs[:-1]), default=Fraction(0))
    return 1 + m / lead


@dataclass(frozen=True)
class RootBracket:
    lo: Fraction
    hi: Fraction
    multiplicity: int

    def contains(self, x) -> bool:
        return self.lo < Fraction(x) <= self.hi


@dataclass(frozen=True)
class HyperbolicityReport:
    degree: int
    real_root_count: int
    Z_c: int
    brackets: tuple[RootBracket, ...]
    all_negative: bool
    all_simple: bool
    distinct_real: int = 0
    method: str = "exact-sturm"

    @property
    def hyperbolic(self) -> bool:
        return self.Z_c == 0

    positive_roots: int = 0

    @property
    def all_nonpositive(self) -> bool:
        return self.Z_c == 0 and self.positive_roots == 0


def isolate_real_roots(p: RealPolynomial, max_width: Optional[Fraction] = None) -> list[RootBracket]:
    """Disjoint half-open intervals (lo, hi], one per distinct real root, with multiplicity."""
    if p.is_zero:
        raise ZeroPolynomialError("cannot isolate roots of the zero polynomial")
    if p.degree <= 0:
        return []
    factors = squarefree_decomposition(p)
    chain = sturm_chain(p)
    factor_chains = [(sturm_chain(f), m) for f, m in factors]
    B = cauchy_bound(p)
    pending = [(-B, B, sturm_count(p, -B, B, chain))]
    found: list[tuple[Fraction, Fraction]] = []
    while pending:
        lo, hi, n = pending.pop()
        if n == 0:
            continue
        if n == 1 and (max_width is None or hi - lo <= max_width):
            found.append((lo, hi))
            continue
        mid = (lo + hi) / 2
        pending.append((lo, mid, sturm_count(p, lo, mid, chain)))
        pending.append((mid, hi, sturm_count(p, mid, hi, chain)))
    found.sort()
    out = []
    for lo, hi in found:
        mult = 0
        for fc, m in factor_chains:
            if _variations(fc, lo) - _variations(fc, hi):
                mult = m
                break
        out.append(RootBracket(lo, hi, mult))
    return out


def hyperbolicity_report(p: RealPolynomial) -> HyperbolicityReport:
    """Exact real-root census of p with multiplicities."""
    if p.is_zero:
        raise ZeroPolynomialError("hyperbolicity of the zero polynomial")
    brackets = isolate_real_roots(p)
    real = sum(b.multiplicity for b in brackets)
    zc = p.degree - real
    chain = sturm_chain(p)
    negative_roots = sturm_count(p, None, 0, chain) - (1 if p(0) == 0 else 0)
    all_negative = zc == 0 and negative_roots == len(brackets)
    positive_roots = sturm_count(p, 0, None, chain)
    return HyperbolicityReport(
        degree=p.degree,
        real_root_count=real,
        Z_c=zc,
        brackets=tuple(brackets),
        all_negative=all_negative,
        all_simple=zc == 0 and all(b.multiplicity == 1 for b in brackets),
        distinct_real=len(brackets),
        positive_roots=positive_roots,
    )


def nonreal_count(p: RealPolynomial) -> int:
    """Z_c(p): nonreal zeros with multiplicity."""
    if p.degree <= 0:
        return 0
    real = 0
    for f, m in squarefree_decomposition(p):
        real += m * sturm_count(f)
    return p.degree - real


def is_real_rooted(p: RealPolynomial) -> bool:
    """Z_c(p) == 0, with a square-free fast path."""
    if p.degree <= 1:
        return True
    chain = sturm_chain(p)
    distinct = sturm_count(p, chain=chain)
    if distinct == p.degree:
        return True
    if len(chain[0]) - 1 == p.degree:
        # square-free and fewer real roots than the degree
        return False
    return nonreal_count(p) == 0


@dataclass(frozen=True)
class CZDSResult:
    before: int
    after: int

    @property
    def satisfied(self) -> bool:
        return self.after <= self.before


def czds_check(gamma: Sequence, p: RealPolynomial) -> CZDSResult:
    """Compare Z_c before and after the termwise action of gamma on p."""
    if len(gamma) < p.degree + 1:
        raise ValueError(f"gamma has {len(gamma)} entries, need {p.degree + 1}")
    q = p.termwise(gamma)
    return CZDSResult(nonreal_count(p), nonreal_count(q) if not q.is_zero else 0)


# -- numeric oracle -------------------------------------------------------------


_U = 2.0**-53


def _log2_abs(q: Fraction) -> float:
    q = abs(q)
    return math.log2(q.numerator) - math.log2(q.denominator)


def companion_roots(coeffs: Sequence, dps: Optional[int] = None) -> list[complex]:
    """Eigenvalues of the companion matrix of sum coeffs[k] z^k.

    The variable is first rescaled by a power of two close to the geometric
    mean root modulus, which keeps graded coefficient sequences (partial
    theta truncations, for instance) inside double range.  ``dps=None`` uses
    numpy (float64); otherwise mpmath at ``dps`` digits, returned as mpmath
    ``mpc`` values.  Zero roots at the origin are returned separately as 0.
    """
    cs = [Fraction(x) for x in coeffs]
    while cs and cs[-1] == 0:
        cs.pop()
    zeros = 0
    while cs and cs[0] == 0:
        cs.pop(0)
        zeros += 1
    n = len(cs) - 1
    if n < 1:
        return [0j] * zeros
    e = round((_log2_abs(cs[0]) - _log2_abs(cs[-1])) / n)
    rho = Fraction(2) ** e
    scaled = [c * rho**k for k, c in enumerate(cs)]
    if dps is None:
        c = np.array([float(x) for x in scaled])
        m = np.zeros((n, n))
        m[1:, :-1] = np.eye(n - 1)
        m[:, -1] = -c[:-1] / c[-1]
        return [complex(z) * float(rho) for z in np.linalg.eigvals(m)] + [0j] * zeros
    import mpmath as mp

    with mp.workdps(dps):
        c = [mp.mpf(x.numerator) / x.denominator for x in scaled]
        m = mp.zeros(n, n)
        for i in range(1, n):
            m[i, i - 1] = 1
        for i in range(n):
            m[i, n - 1] = -c[i] / c[-1]
        ev = mp.eig(m, left=False, right=False)
        r = mp.mpf(rho.numerator) / rho.denominator
        return [z * r for z in ev] + [mp.mpc(0)] * zeros


def oracle_real_count(p: RealPolynomial, rel_tol: float = 1e-6, gray: float = 1e-3) -> int:
    """Numeric count of real roots (with multiplicity) from companion eigenvalues.

    A root is real when |Im z| <= rel_tol * max(1, |z|).  In double precision a
    real root of multiplicity m splits into a cluster of radius ~eps**(1/m), so
    the count is redone at 40 * degree digits when a root falls in the band
    (rel_tol, gray] or a nonreal root has a neighbour that close.  There every
    multiple root splits by roughly 10**(-40), far below the 1e-15 threshold.
    """
    ev = companion_roots(p.coeffs)
    scaled = [abs(z.imag) / max(1.0, abs(z)) for z in ev]
    radius = 8 * _U ** (1 / max(1, p.degree))
    clustered = any(
        s > rel_tol and any(j != i and abs(w - z) <= radius * max(1.0, abs(z)) for j, w in enumerate(ev))
        for i, (z, s) in enumerate(zip(ev, scaled)))
    if not clustered and all(s <= rel_tol or s > gray for s in scaled):
        return sum(1 for s in scaled if s <= rel_tol)
    import mpmath as mp

    ev = companion_roots(p.coeffs, dps=max(60, 40 * p.degree))
    thr = mp.mpf(10) ** -15
    return sum(1 for z in ev if abs(mp.im(z)) <= thr * max(1, abs(z)))
