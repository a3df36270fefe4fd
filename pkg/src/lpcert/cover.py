"""Certified positivity of a real function on a segment.

A target exposes an enclosure of its value at a rational point and an
enclosure of its derivative over a box.  On each box [l, h] with split point
m the mean value theorem gives

    f(x) >= f(m).lo - max|f'([l, h])| * max(m - l, h - m),

and boxes are bisected until every lower bound is positive.  Every accepted
box is kept, so a cover doubles as a replayable trace.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Protocol, Sequence

from gmpy2 import mpz

from .interval import Bracket, Interval, horner


class PrecisionCapError(RuntimeError):
    """The requested decision needs more resolution than the configured cap."""


class NonPositivePoint(Exception):
    def __init__(self, point: Fraction, value: Bracket):
        super().__init__(f"f({point}) in [{float(value.lo)}, {float(value.hi)}] is not positive")
        self.point = point
        self.value = value


class Target(Protocol):
    def point(self, x: Fraction) -> Bracket: ...

    def slope(self, lo: Fraction, hi: Fraction) -> Interval: ...


@dataclass(frozen=True)
class Cover:
    lo: Fraction
    hi: Fraction
    boxes: tuple[tuple[Fraction, Fraction, Fraction], ...]  # (left, right, lower bound)

    @property
    def min_lower(self) -> Fraction:
        return min(b[2] for b in self.boxes)

    def __len__(self) -> int:
        return len(self.boxes)


def split_point(lo: Fraction, hi: Fraction) -> Fraction:
    """A short dyadic rational near the middle of (lo, hi).

    Splitting at dyadic points keeps every interior breakpoint of a cover an
    exact finite decimal, so covers serialize without rounding.
    """
    width = hi - lo
    e = 0
    while Fraction(1, 2**e) * 4 > width:
        e += 1
    scale = 2**e
    m = Fraction(math.floor((lo + hi) / 2 * scale), scale)
    if not lo < m < hi:
        m = Fraction(math.ceil((lo + hi) / 2 * scale), scale)
    return m if lo < m < hi else (lo + hi) / 2


def box_lower_bound(target: Target, lo: Fraction, hi: Fraction) -> Fraction:
    m = split_point(lo, hi)
    v = target.point(m)
    d = target.slope(lo, hi)
    return v.lo - Fraction(d.mag) * max(m - lo, hi - m)


def certify_positive(target: Target, lo, hi, *, initial: int = 16,
                     min_width: Fraction = Fraction(1, 2**70), max_boxes: int = 100_000) -> Cover:
    """Cover [lo, hi] by boxes with positive certified lower bounds.

    Raises :class:`NonPositivePoint` when a sampled value is certainly <= 0
    and :class:`PrecisionCapError` when boxes shrink below ``min_width``.
    """
    lo, hi = Fraction(lo), Fraction(hi)
    if hi < lo:
        raise ValueError("empty segment")
    for x in (lo, hi):
        v = target.point(x)
        if v.hi <= 0:
            raise NonPositivePoint(x, v)
    if hi == lo:
        v = target.point(lo)
        if v.lo <= 0:
            raise PrecisionCapError(f"cannot certify sign at {lo}")
        return Cover(lo, hi, ((lo, hi, v.lo),))
    points = [lo]
    step = (hi - lo) / initial
    for i in range(1, initial):
        a = points[-1]
        target_pt = lo + i * step
        m = split_point(a, min(hi, target_pt + step / 2)) if target_pt > a else None
        if m is not None and a < m < hi:
            points.append(m)
    points.append(hi)
    stack = [(a, b) for a, b in zip(points, points[1:])]
    stack.reverse()
    accepted: list[tuple[Fraction, Fraction, Fraction]] = []
    while stack:
        a, b = stack.pop()
        m = split_point(a, b)
        v = target.point(m)
        if v.hi <= 0:
            raise NonPositivePoint(m, v)
        d = target.slope(a, b)
        lb = v.lo - Fraction(d.mag) * max(m - a, b - m)
        if lb > 0:
            accepted.append((a, b, lb))
            continue
        if b - a < min_width:
            raise PrecisionCapError(
                f"positivity undecided on [{float(a)}, {float(b)}]; value near {float(v.lo):.3e}")
        if len(accepted) + len(stack) > max_boxes:
            raise PrecisionCapError(f"cover exceeded {max_boxes} boxes")
        stack.append((m, b))
        stack.append((a, m))
    accepted.sort()
    return Cover(lo, hi, tuple(accepted))


def replay_cover(target: Target, cover: Cover) -> bool:
    """Recheck a stored cover: contiguous boxes, each lower bound reproducible and positive."""
    if not cover.boxes:
        return False
    if cover.boxes[0][0] != cover.lo or cover.boxes[-1][1] != cover.hi:
        return False
    for (a, b, _), (c, _, _) in zip(cover.boxes, cover.boxes[1:]):
        if b != c:
            return False
    for a, b, lb in cover.boxes:
        if a == b:
            if target.point(a).lo <= 0:
                return False
            continue
        if box_lower_bound(target, a, b) <= 0:
            return False
    return True


class SeriesTarget:
    """f(x) = sum coeffs[k] x^k + tail(x) on x >= 0, with a tail bound callback.

    ``tail(xmax)`` must return ``(T0, T1)`` bounding |tail| and |tail'| on
    [0, xmax] (both zero for a plain polynomial).
    """

    def __init__(self, coeffs: Sequence[Fraction],
                 tail: Callable[[Fraction], tuple[Fraction, Fraction]] | None = None):
        self.coeffs = [Fraction(c) for c in coeffs]
        self.tail = tail
        den = 1
        for c in self.coeffs:
            den = math.lcm(den, c.denominator)
        self._den = mpz(den)
        self._num = [mpz(c.numerator * (den // c.denominator)) for c in self.coeffs]
        self._dcoeffs = [Interval.exact(k * c) for k, c in enumerate(self.coeffs) if k]

    def _tails(self, xmax: Fraction) -> tuple[Fraction, Fraction]:
        if self.tail is None:
            return Fraction(0), Fraction(0)
        return self.tail(xmax)

    def point(self, x: Fraction) -> Bracket:
        x = Fraction(x)
        n, d = mpz(x.numerator), mpz(x.denominator)
        # homogenised Horner: sum c_k n^k d^(deg-k), then one division
        acc = mpz(0)
        dpow = mpz(1)
        for c in reversed(self._num):
            acc = acc * n + c * dpow
            dpow *= d
        acc = Fraction(int(acc), int(self._den * dpow // d)) if self._num else Fraction(0)
        t0, _ = self._tails(abs(x))
        return Bracket(acc - t0, acc + t0)

    def slope(self, lo: Fraction, hi: Fraction) -> Interval:
        d = horner(self._dcoeffs, Interval.hull(lo, hi)) if self._dcoeffs else Interval(0.0)
        _, t1 = self._tails(max(abs(lo), abs(hi)))
        if t1:
            d = d + Interval.exact(t1).symmetric()
        return d
