"""Exact real polynomials over the rationals.

Coefficients are stored low -> high as :class:`fractions.Fraction`.  Heavy
operations (remainder sequences, gcd) run on primitive integer polynomials,
which keeps coefficient growth in check far better than naive rational
Euclid.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Iterable, Sequence

from gmpy2 import gcd as gmp_gcd, mpz

from .interval import Interval


_MPZ = type(mpz(0))


def _strip(cs: list) -> list:
    while cs and cs[-1] == 0:
        cs.pop()
    return cs


@dataclass(frozen=True)
class RealPolynomial:
    """P(z) = sum_k coeffs[k] z^k with exact rational coefficients."""

    coeffs: tuple[Fraction, ...]

    def __init__(self, coeffs: Iterable):
        cs = _strip([Fraction(int(c)) if type(c) is _MPZ else Fraction(c) for c in coeffs])
        object.__setattr__(self, "coeffs", tuple(cs))

    @classmethod
    def from_roots(cls, roots: Iterable, lead=1) -> "RealPolynomial":
        p = cls([lead])
        for r in roots:
            p = p * cls([-Fraction(r), 1])
        return p

    @classmethod
    def monomial(cls, k: int, c=1) -> "RealPolynomial":
        return cls([0] * k + [c])

    @property
    def degree(self) -> int:
        """Degree; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def lead(self) -> Fraction:
        return self.coeffs[-1]

    def __repr__(self) -> str:
        return f"RealPolynomial({[str(c) for c in self.coeffs]})"

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __eq__(self, other) -> bool:
        return isinstance(other, RealPolynomial) and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __add__(self, other: "RealPolynomial") -> "RealPolynomial":
        n = max(len(self.coeffs), len(other.coeffs))
        a = list(self.coeffs) + [0] * (n - len(self.coeffs))
        b = list(other.coeffs) + [0] * (n - len(other.coeffs))
        return RealPolynomial(x + y for x, y in zip(a, b))

    def __neg__(self) -> "RealPolynomial":
        return RealPolynomial(-c for c in self.coeffs)

    def __sub__(self, other: "RealPolynomial") -> "RealPolynomial":
        return self + (-other)

    def __mul__(self, other) -> "RealPolynomial":
        if not isinstance(other, RealPolynomial):
            return RealPolynomial(c * other for c in self.coeffs)
        if self.is_zero or other.is_zero:
            return RealPolynomial([])
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return RealPolynomial(out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "RealPolynomial":
        return reduce(lambda p, _: p * self, range(n), RealPolynomial([1]))

    def derivative(self) -> "RealPolynomial":
        return RealPolynomial(k * c for k, c in enumerate(self.coeffs) if k)

    def divmod(self, other: "RealPolynomial") -> tuple["RealPolynomial", "RealPolynomial"]:
        if other.is_zero:
            raise ZeroDivisionError("polynomial division by zero")
        r = list(self.coeffs)
        dq = len(r) - len(other.coeffs)
        if dq < 0:
            return RealPolynomial([]), self
        q = [Fraction(0)] * (dq + 1)
        lead = other.lead
        for k in range(dq, -1, -1):
            c = r[k + other.degree] / lead
            q[k] = c
            if c:
                for j, b in enumerate(other.coeffs):
                    r[k + j] -= c * b
        return RealPolynomial(q), RealPolynomial(r[: other.degree])

    def __floordiv__(self, other: "RealPolynomial") -> "RealPolynomial":
        return self.divmod(other)[0]

    def __mod__(self, other: "RealPolynomial") -> "RealPolynomial":
        return self.divmod(other)[1]

    def monic(self) -> "RealPolynomial":
        return self * (1 / self.lead)

    def scale_argument(self, lam) -> "RealPolynomial":
        """P(lam * z)."""
        lam = Fraction(lam)
        return RealPolynomial(c * lam**k for k, c in enumerate(self.coeffs))

    def reflect(self) -> "RealPolynomial":
        """P(-z)."""
        return RealPolynomial(c if k % 2 == 0 else -c for k, c in enumerate(self.coeffs))

    def termwise(self, gamma: Sequence) -> "RealPolynomial":
        """sum gamma_k c_k z^k (a multiplier-sequence action)."""
        if len(gamma) < len(self.coeffs):
            raise ValueError(
                f"need {len(self.coeffs)} multipliers for degree {self.degree}, got {len(gamma)}"
            )
        return RealPolynomial(Fraction(g) * c for g, c in zip(gamma, self.coeffs))

    def interval_coeffs(self) -> list[Interval]:
        return [Interval.exact(c) for c in self.coeffs]

    def to_float(self) -> list[float]:
        return [float(c) for c in self.coeffs]

    # integer-backed helpers -------------------------------------------------

    def primitive_int(self) -> list[int]:
        """Positive multiple of self with coprime integer coefficients."""
        return _primitive(_to_int(self.coeffs))

    @classmethod
    def from_int(cls, cs: Sequence[int]) -> "RealPolynomial":
        return cls(cs)


def _to_int(cs: Sequence[Fraction]) -> list[int]:
    den = 1
    for c in cs:
        den = den * c.denominator // math.gcd(den, c.denominator)
    return [int(c * den) for c in cs]


def _primitive(cs: list[int]) -> list[int]:
    g = mpz(0)
    for c in cs:
        g = gmp_gcd(g, c)
        if g == 1:
            return cs
    if g > 1:
        cs = [c // g for c in cs]
    return cs


def int_derivative(cs: Sequence[int]) -> list[int]:
    return [k * c for k, c in enumerate(cs) if k]


def int_prem(a: Sequence[int], b: Sequence[int]) -> list[int]:
    """Pseudo-remainder of a by b with a positive multiplier |lc(b)|**(da-db+1)."""
    r = list(a)
    db = len(b) - 1
    lb = b[-1]
    sign = 1 if lb > 0 else -1
    lb_abs = abs(lb)
    while len(r) - 1 >= db and r:
        lr = r[-1]
        shift = len(r) - 1 - db
        # |lb| * r - sign * lr * x^shift * b
        r = [lb_abs * c for c in r]
        f = sign * lr
        for j, bj in enumerate(b):
            r[shift + j] -= f * bj
        r.pop()
        _strip(r)
        if r:
            r = _primitive(r)
    return r


def int_gcd(a: Sequence[int], b: Sequence[int]) -> list[int]:
    """Primitive gcd of two integer polynomials, positive leading coefficient."""
    a, b = list(a), list(b)
    _strip(a)
    _strip(b)
    if not b:
        g = _primitive(a)
    elif not a:
        g = _primitive(b)
    else:
        if len(a) < len(b):
            a, b = b, a
        a, b = _primitive(a), _primitive(b)
        while b:
            r = int_prem(a, b)
            a, b = b, r
        g = _primitive(a)
    if g and g[-1] < 0:
        g = [-c for c in g]
    return g


def int_exact_div(a: Sequence[int], b: Sequence[int]) -> list[int]:
    """Exact quotient a / b over Q, returned as a primitive integer polynomial."""
    q, r = RealPolynomial(a).divmod(RealPolynomial(b))
    if not r.is_zero:
        raise ArithmeticError("inexact polynomial division")
    return q.primitive_int()


def gcd(p: RealPolynomial, q: RealPolynomial) -> RealPolynomial:
    """Monic gcd over Q."""
    g = int_gcd(_to_int(p.coeffs) if p.coeffs else [], _to_int(q.coeffs) if q.coeffs else [])
    return RealPolynomial(g).monic() if g else RealPolynomial([])


def squarefree_decomposition(p: RealPolynomial) -> list[tuple[RealPolynomial, int]]:
    """Yun's algorithm: p = lead * prod f_i**i with f_i square-free and coprime.

    Returns ``[(f_i, i), ...]`` for the nonconstant factors only; each f_i is
    monic.
    """
    if p.is_zero:
        raise ValueError("zero polynomial has no square-free decomposition")
    if p.degree == 0:
        return []
    a = p.monic()
    da = a.derivative()
    g = gcd(a, da)
    b = a // g
    c = da // g
    d = c - b.derivative()
    out: list[tuple[RealPolynomial, int]] = []
    i = 1
    while b.degree > 0:
        f = gcd(b, d)
        if f.degree > 0:
            out.append((f, i))
        b = b // f
        c = d // f
        d = c - b.derivative()
        i += 1
    return out


def squarefree_part(p: RealPolynomial) -> RealPolynomial:
    a = p.primitive_int()
    g = int_gcd(a, int_derivative(a))
    return RealPolynomial(int_exact_div(a, g))
