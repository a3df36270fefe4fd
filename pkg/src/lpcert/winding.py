"""Argument-principle zero counting on a circle.

F is given as a polynomial P (exact rational coefficients) plus a bound T on
|F - P| over the circle |z| = r.  On a mesh of N arcs we certify, for every
arc, that all values of F lie in a disk around the computed mesh value whose
radius is below |value| * sin(pi/4).  That rules out zeros on the arc and pins
each argument increment inside (-pi/2, pi/2), so the winding number is the
rounded sum of principal-value increments.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .interval import frac_up

_U = 2.0**-53
_SIN_QUARTER = math.sin(math.pi / 4) * (1 - 1e-12)


class WindingInconclusive(RuntimeError):
    """Nonvanishing on the circle could not be certified."""

    def __init__(self, message: str, arc: tuple[float, float]):
        super().__init__(message)
        self.arc = arc


@dataclass(frozen=True)
class CircleFunction:
    """F(z) = sum coeffs[k] z^k + E(z) with |E| <= tail on the circle of interest."""

    coeffs: tuple[Fraction, ...]
    tail: Fraction = Fraction(0)

    def __init__(self, coeffs: Sequence, tail=0):
        object.__setattr__(self, "coeffs", tuple(Fraction(c) for c in coeffs))
        object.__setattr__(self, "tail", Fraction(tail))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1


@dataclass(frozen=True)
class WindingResult:
    count: int
    arcs: int
    min_modulus: float  # lower bound of |F| at mesh points
    rounding_slack: float  # certified distance of the raw sum from the integer (in turns)


def _horner_complex(cs: np.ndarray, z: np.ndarray) -> np.ndarray:
    acc = np.zeros_like(z)
    for c in cs[::-1]:
        acc = acc * z + c
    return acc


def winding_number(F: CircleFunction, radius, start: int = 64, cap: int = 2**20) -> int:
    return winding_details(F, radius, start, cap).count


def winding_details(F: CircleFunction, radius, start: int = 64, cap: int = 2**20) -> WindingResult:
    """Winding number of F around 0 along |z| = radius, with certification data."""
    r = Fraction(radius)
    if r <= 0:
        raise ValueError("radius must be positive")
    cs = F.coeffs
    d = len(cs) - 1
    if d < 0:
        raise WindingInconclusive("F is identically zero on the circle", (0.0, 2 * math.pi))
    abs_sum = sum(abs(c) * r**k for k, c in enumerate(cs))
    deriv_sum = sum(k * abs(c) * r ** (k - 1) for k, c in enumerate(cs) if k)
    S = frac_up(abs_sum)
    M1 = frac_up(deriv_sum)
    T = frac_up(F.tail)
    rf = frac_up(r)
    # a-priori float error at a mesh point: Horner rounding + coefficient
    # rounding + error in the mesh point itself
    eval_err = 8 * (d + 2) * _U * S + M1 * rf * 8 * _U
    cf = np.array([float(c) for c in cs], dtype=complex)
    n = start
    last_bad = (0.0, 2 * math.pi)
    while n <= cap:
        theta = 2 * np.pi * np.arange(n) / n
        z = float(r) * np.exp(1j * theta)
        w = _horner_complex(cf, z)
        mod = np.abs(w)
        dtheta = 2 * math.pi / n * (1 + 1e-12)
        rho = M1 * rf * dtheta + 3 * T + eval_err
        ok = rho < mod * _SIN_QUARTER
        if ok.all():
            inc = np.angle(np.roll(w, -1) / w)
            total = inc.sum() / (2 * math.pi)
            count = int(round(total))
            # angular error of each computed value w.r.t. the true F(z_k)
            ang_err = np.arcsin(np.minimum(1.0, (eval_err + T) / mod))
            slack = 2 * ang_err.sum() / (2 * math.pi) + n * 4e-16
            if abs(total - count) + slack >= 0.5:
                raise WindingInconclusive(
                    f"argument sum {total} not certifiably integral", (0.0, 2 * math.pi))
            return WindingResult(count, n, float(mod.min()) - eval_err - T,
                                 float(0.5 - abs(total - count) - slack))
        k = int(np.argmin(mod * _SIN_QUARTER - rho))
        last_bad = (float(theta[k]), float(theta[k]) + 2 * math.pi / n)
        n *= 2
    raise WindingInconclusive(
        f"cannot certify F != 0 on |z| = {radius} with {cap} arcs", last_bad)
