"""Directed-rounding interval arithmetic.

Two enclosure types live here:

* :class:`Interval` -- float endpoints, every operation widened outward by one
  ulp.  Fast enough for branch-and-bound covers and theta-mesh sweeps.
* :class:`Bracket` -- exact :class:`~fractions.Fraction` endpoints.  Used for
  results that must be reported to arbitrary tolerance (c_n brackets, theta
  values, certificate numbers).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from decimal import ROUND_CEILING, ROUND_FLOOR, Decimal, localcontext
from fractions import Fraction
from typing import Iterable, Union

Number = Union[int, float, Fraction]

_INF = math.inf


def _dn(x: float) -> float:
    return math.nextafter(x, -_INF)


def _up(x: float) -> float:
    return math.nextafter(x, _INF)


def frac_down(q: Fraction) -> float:
    """Largest float <= q."""
    f = float(q)
    return f if Fraction(f) <= q else _dn(f)


def frac_up(q: Fraction) -> float:
    """Smallest float >= q."""
    f = float(q)
    return f if Fraction(f) >= q else _up(f)


class Interval:
    """Closed interval [lo, hi] with float endpoints and outward rounding."""

    __slots__ = ("lo", "hi")

    def __init__(self, lo: float, hi: float | None = None):
        if hi is None:
            hi = lo
        if lo > hi:
            raise ValueError(f"empty interval [{lo}, {hi}]")
        self.lo = lo
        self.hi = hi

    @classmethod
    def exact(cls, q: Number) -> "Interval":
        if isinstance(q, float):
            return cls(q, q)
        q = Fraction(q)
        return cls(frac_down(q), frac_up(q))

    @classmethod
    def hull(cls, a: Number, b: Number) -> "Interval":
        x, y = cls.exact(a), cls.exact(b)
        return cls(min(x.lo, y.lo), max(x.hi, y.hi))

    def __repr__(self) -> str:
        return f"Interval({self.lo!r}, {self.hi!r})"

    @property
    def width(self) -> float:
        return _up(self.hi - self.lo)

    @property
    def mid(self) -> float:
        return 0.5 * (self.lo + self.hi)

    @property
    def mag(self) -> float:
        return max(abs(self.lo), abs(self.hi))

    @property
    def mig(self) -> float:
        if self.lo <= 0.0 <= self.hi:
            return 0.0
        return min(abs(self.lo), abs(self.hi))

    def contains(self, x: Number) -> bool:
        if isinstance(x, Fraction):
            return Fraction(self.lo) <= x <= Fraction(self.hi)
        return self.lo <= x <= self.hi

    def __contains__(self, x: Number) -> bool:
        return self.contains(x)

    @staticmethod
    def _coerce(other) -> "Interval":
        if isinstance(other, Interval):
            return other
        return Interval.exact(other)

    def __add__(self, other) -> "Interval":
        o = self._coerce(other)
        return Interval(_dn(self.lo + o.lo), _up(self.hi + o.hi))

    __radd__ = __add__

    def __neg__(self) -> "Interval":
        return Interval(-self.hi, -self.lo)

    def __sub__(self, other) -> "Interval":
        o = self._coerce(other)
        return Interval(_dn(self.lo - o.hi), _up(self.hi - o.lo))

    def __rsub__(self, other) -> "Interval":
        return self._coerce(other) - self

    def __mul__(self, other) -> "Interval":
        o = self._coerce(other)
        a, b, c, d = self.lo, self.hi, o.lo, o.hi
        if a >= 0.0 and c >= 0.0:
            return Interval(_dn(a * c), _up(b * d))
        ps = (a * c, a * d, b * c, b * d)
        return Interval(_dn(min(ps)), _up(max(ps)))

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Interval":
        o = self._coerce(other)
        if o.lo <= 0.0 <= o.hi:
            raise ZeroDivisionError("interval divisor contains zero")
        qs = (self.lo / o.lo, self.lo / o.hi, self.hi / o.lo, self.hi / o.hi)
        return Interval(_dn(min(qs)), _up(max(qs)))

    def __rtruediv__(self, other) -> "Interval":
        return self._coerce(other) / self

    def __pow__(self, n: int) -> "Interval":
        if not isinstance(n, int) or n < 0:
            raise ValueError("only nonnegative integer powers")
        if n == 0:
            return Interval(1.0)
        result = Interval(1.0)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base.sqr()
        return result

    def sqr(self) -> "Interval":
        if self.lo >= 0.0:
            return Interval(_dn(self.lo * self.lo), _up(self.hi * self.hi))
        if self.hi <= 0.0:
            return Interval(_dn(self.hi * self.hi), _up(self.lo * self.lo))
        m = max(-self.lo, self.hi)
        return Interval(0.0, _up(m * m))

    def abs(self) -> "Interval":
        return Interval(self.mig, self.mag)

    def sqrt(self) -> "Interval":
        if self.lo < 0.0:
            raise ValueError("sqrt of interval with negative part")
        return Interval(max(0.0, _dn(math.sqrt(self.lo))), _up(math.sqrt(self.hi)))

    def union(self, other: "Interval") -> "Interval":
        return Interval(min(self.lo, other.lo), max(self.hi, other.hi))

    def symmetric(self) -> "Interval":
        """[-mag, mag]."""
        m = self.mag
        return Interval(-m, m)


def horner(coeffs: Iterable[Interval], x: Interval) -> Interval:
    """Interval Horner evaluation, coefficients low -> high."""
    cs = list(coeffs)
    acc = Interval(0.0)
    for c in reversed(cs):
        acc = acc * x + c
    return acc


@dataclass(frozen=True)
class Bracket:
    """Exact rational enclosure [lo, hi]."""

    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        object.__setattr__(self, "lo", Fraction(self.lo))
        object.__setattr__(self, "hi", Fraction(self.hi))
        if self.lo > self.hi:
            raise ValueError(f"empty bracket [{self.lo}, {self.hi}]")

    @classmethod
    def point(cls, x: Number) -> "Bracket":
        return cls(Fraction(x), Fraction(x))

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    @property
    def radius(self) -> Fraction:
        return (self.hi - self.lo) / 2

    def contains(self, x: Number) -> bool:
        return self.lo <= Fraction(x) <= self.hi

    def __contains__(self, x: Number) -> bool:
        return self.contains(x)

    def overlaps(self, other: "Bracket", slack: Number = 0) -> bool:
        slack = Fraction(slack)
        return self.lo - slack <= other.hi and other.lo - slack <= self.hi

    def strictly_below(self, other: "Bracket") -> bool:
        return self.hi < other.lo

    def widen(self, r: Number) -> "Bracket":
        r = Fraction(r)
        return Bracket(self.lo - r, self.hi + r)

    def to_interval(self) -> Interval:
        return Interval(frac_down(self.lo), frac_up(self.hi))

    def __float__(self) -> float:
        return float(self.mid)

    def __str__(self) -> str:
        return format_pm(self.mid, self.radius)


def _decimal_of(q: Fraction, digits: int) -> Decimal:
    with localcontext() as ctx:
        ctx.prec = digits
        return Decimal(q.numerator) / Decimal(q.denominator)


def format_pm(value: Number, radius: Number = 0, digits: int = 30) -> str:
    """Render ``value ± radius`` so the printed interval encloses the true one.

    Exact finite decimals print with radius 0.  Otherwise the mid-point is
    rounded to ``digits`` significant digits and the rounding error is folded
    into the (upward-rounded) radius.
    """
    value = Fraction(value)
    radius = Fraction(radius)
    if radius < 0:
        raise ValueError("negative radius")
    exact = _exact_decimal(value)
    if exact is not None and len(exact.replace("-", "").replace(".", "")) <= digits + 2:
        mid_str, err = exact, Fraction(0)
    else:
        d = _decimal_of(value, digits)
        mid_str = _plain(d)
        err = abs(Fraction(d) - value)
    total = radius + err
    if total == 0:
        return f"{mid_str} ± 0"
    with localcontext() as ctx:
        ctx.prec = 3
        ctx.rounding = ROUND_CEILING
        r = Decimal(total.numerator) / Decimal(total.denominator)
    if Fraction(r) < total:  # pragma: no cover - ROUND_CEILING guarantees this
        r = r.next_plus()
    return f"{mid_str} ± {r:.2E}"


def _plain(d: Decimal) -> str:
    s = format(d, "f")
    if "." in s:
        s = s.rstrip("0").rstrip(".")
    return s or "0"


def _exact_decimal(q: Fraction) -> str | None:
    den = q.denominator
    twos = fives = 0
    while den % 2 == 0:
        den //= 2
        twos += 1
    while den % 5 == 0:
        den //= 5
        fives += 1
    if den != 1:
        return None
    places = max(twos, fives)
    scaled = q * 10**places
    assert scaled.denominator == 1
    n = scaled.numerator
    sign = "-" if n < 0 else ""
    s = str(abs(n)).rjust(places + 1, "0")
    if places:
        s = s[:-places] + "." + s[-places:]
        s = s.rstrip("0").rstrip(".")
    return sign + s


def _directed_decimal(q: Fraction, digits: int, rounding: str) -> str:
    q = Fraction(q)
    exact = _exact_decimal(q)
    if exact is not None and len(exact.replace("-", "").replace(".", "")) <= digits + 2:
        return exact
    with localcontext() as ctx:
        ctx.prec = digits
        ctx.rounding = rounding
        d = Decimal(q.numerator) / Decimal(q.denominator)
    return _plain(d)


def decimal_down(q: Number, digits: int = 25) -> str:
    """Decimal string <= q (exact when q is a short decimal)."""
    return _directed_decimal(Fraction(q), digits, ROUND_FLOOR)


def decimal_up(q: Number, digits: int = 25) -> str:
    """Decimal string >= q (exact when q is a short decimal)."""
    return _directed_decimal(Fraction(q), digits, ROUND_CEILING)


def parse_pm(text: str) -> Bracket:
    """Inverse of :func:`format_pm` (accepts ``"x ± r"``, ``"x+-r"`` or ``"x"``)."""
    t = text.replace("+-", "±").replace("+/-", "±")
    if "±" in t:
        mid, rad = t.split("±", 1)
        m, r = Fraction(mid.strip()), Fraction(rad.strip())
    else:
        m, r = Fraction(t.strip()), Fraction(0)
    if r < 0:
        raise ValueError(f"negative radius in {text!r}")
    return Bracket(m - r, m + r)


def isqrt_bracket(q: Fraction, bits: int) -> Bracket:
    """Rational enclosure of sqrt(q) of width about 2**-bits (exact for squares)."""
    q = Fraction(q)
    if q < 0:
        raise ValueError("sqrt of negative number")
    rn, rd = math.isqrt(q.numerator), math.isqrt(q.denominator)
    if rn * rn == q.numerator and rd * rd == q.denominator:
        return Bracket.point(Fraction(rn, rd))
    scale = 1 << (2 * bits)
    n = q.numerator * scale // q.denominator
    r = math.isqrt(n)
    lo = Fraction(r, 1 << bits)
    hi = Fraction(r + 1, 1 << bits)
    # floor effects: lo**2 <= q < hi**2 holds by construction of isqrt
    assert lo * lo <= q <= hi * hi
    return Bracket(lo, hi)


def format_exact(q: Number) -> str:
    """Exact rendering ``x ± 0``: a finite decimal when possible, else ``n/d ± 0``."""
    q = Fraction(q)
    exact = _exact_decimal(q)
    if exact is None:
        exact = f"{q.numerator}/{q.denominator}"
    return f"{exact} ± 0"


def parse_exact(text: str) -> Fraction:
    b = parse_pm(text)
    if b.lo != b.hi:
        raise ValueError(f"expected an exact value, got {text!r}")
    return b.lo
