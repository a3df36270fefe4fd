"""Positive coefficient series and their quotient sequences.

For f(z) = sum a_k z^k with a_k > 0:

    p_n = a_{n-1} / a_n          (n >= 1)
    q_n = p_n / p_{n-1}          (n >= 2)

A series is either an explicit finite list of coefficients or generated on
demand from a *quotient rule* (constant q, an explicit list of q_n, or
q_n = c - d/n).  All arithmetic is exact: decimal literals are read as the
rationals they denote.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Iterable, Optional, Sequence, Union

from .interval import Bracket


class SeriesError(ValueError):
    """Malformed or inadmissible series input."""


def to_fraction(value: Any) -> Fraction:
    """Exact rational from int, Fraction, decimal/fraction string, or float repr."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise SeriesError(f"not a number: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        # floats reach us only from programmatic callers; use their shortest repr
        return Fraction(repr(value))
    if isinstance(value, str):
        text = value.strip().replace("−", "-")
        try:
            return Fraction(text)
        except (ValueError, ZeroDivisionError) as exc:
            raise SeriesError(f"not a rational literal: {value!r}") from exc
    raise SeriesError(f"not a number: {value!r}")


# -- quotient rules -----------------------------------------------------------


@dataclass(frozen=True)
class QuotientRule:
    """Generator of q_2, q_3, ... together with a_0 and a_1.

    kind is one of ``constant`` (q_n = q), ``list`` (explicit q_2..q_N) or
    ``limit-increasing`` (q_n = c - d/n, n >= 2).
    """

    kind: str
    q: Optional[Fraction] = None
    qs: tuple[Fraction, ...] = ()
    c: Optional[Fraction] = None
    d: Optional[Fraction] = None
    a0: Fraction = Fraction(1)
    a1: Fraction = Fraction(1)

    def __post_init__(self):
        if self.kind not in ("constant", "list", "limit-increasing"):
            raise SeriesError(f"unknown rule type {self.kind!r}")
        if self.a0 <= 0 or self.a1 <= 0:
            raise SeriesError("a0 and a1 must be positive")
        if self.kind == "constant":
            if self.q is None or self.q <= 0:
                raise SeriesError("constant rule needs q > 0")
        elif self.kind == "list":
            if not self.qs:
                raise SeriesError("list rule needs a nonempty q list")
            for i, v in enumerate(self.qs):
                if v <= 0:
                    raise SeriesError(f"q_{i + 2} = {v} is not positive")
        else:
            if self.c is None or self.d is None:
                raise SeriesError("limit-increasing rule needs c and d")
            if self.c - self.d / 2 <= 0:
                raise SeriesError("limit-increasing rule needs q_2 = c - d/2 > 0")
            if self.c <= 0:
                raise SeriesError("limit-increasing rule needs c > 0")

    @classmethod
    def constant(cls, q, a0=1, a1=1) -> "QuotientRule":
        return cls("constant", q=to_fraction(q), a0=to_fraction(a0), a1=to_fraction(a1))

    @classmethod
    def from_list(cls, qs: Iterable, a0=1, a1=1) -> "QuotientRule":
        return cls("list", qs=tuple(to_fraction(v) for v in qs), a0=to_fraction(a0), a1=to_fraction(a1))

    @classmethod
    def limit_increasing(cls, c, d, a0=1, a1=1) -> "QuotientRule":
        return cls("limit-increasing", c=to_fraction(c), d=to_fraction(d),
                   a0=to_fraction(a0), a1=to_fraction(a1))

    @classmethod
    def from_json(cls, obj: Union[str, dict]) -> "QuotientRule":
        if isinstance(obj, str):
            try:
                obj = json.loads(obj, parse_float=Fraction)
            except json.JSONDecodeError as exc:
                raise SeriesError(f"rule is not valid JSON: {exc}") from exc
        if not isinstance(obj, dict):
            raise SeriesError("rule must be a JSON object")
        kind = obj.get("type")
        extra = {k: to_fraction(obj[k]) for k in ("a0", "a1") if k in obj}
        if kind == "constant":
            return cls.constant(obj["q"], **extra) if "q" in obj else cls("constant", **extra)
        if kind == "list":
            qs = obj.get("q")
            if not isinstance(qs, list):
                raise SeriesError("list rule needs \"q\": [...]")
            return cls.from_list(qs, **extra)
        if kind == "limit-increasing":
            if "c" not in obj or "d" not in obj:
                raise SeriesError("limit-increasing rule needs c and d")
            return cls.limit_increasing(obj["c"], obj["d"], **extra)
        raise SeriesError(f"unknown rule type {kind!r}")

    def to_json(self) -> dict:
        out: dict[str, Any] = {"type": self.kind}
        if self.kind == "constant":
            out["q"] = _num(self.q)
        elif self.kind == "list":
            out["q"] = [_num(v) for v in self.qs]
        else:
            out["c"] = _num(self.c)
            out["d"] = _num(self.d)
        if self.a0 != 1:
            out["a0"] = _num(self.a0)
        if self.a1 != 1:
            out["a1"] = _num(self.a1)
        return out

    @property
    def finite(self) -> bool:
        return self.kind == "list"

    @property
    def last_index(self) -> Optional[int]:
        """Largest coefficient index the rule defines (None: unbounded)."""
        return len(self.qs) + 1 if self.kind == "list" else None

    def q_at(self, n: int) -> Fraction:
        if n < 2:
            raise SeriesError(f"q_n is defined for n >= 2, got {n}")
        if self.kind == "constant":
            return self.q
        if self.kind == "list":
            if n - 2 >= len(self.qs):
                raise SeriesError(f"list rule defines q_2..q_{len(self.qs) + 1}, asked for q_{n}")
            return self.qs[n - 2]
        return self.c - self.d / n

    @property
    def limit(self) -> Optional[Fraction]:
        """Analytic lim q_n (None for finite lists)."""
        if self.kind == "constant":
            return self.q
        if self.kind == "limit-increasing":
            return self.c
        return None

    @property
    def increasing(self) -> Optional[bool]:
        """Non-strict monotonicity known analytically (None for lists)."""
        if self.kind == "constant":
            return True
        if self.kind == "limit-increasing":
            return self.d >= 0
        return None

    @property
    def decreasing(self) -> Optional[bool]:
        if self.kind == "constant":
            return True
        if self.kind == "limit-increasing":
            return self.d <= 0
        return None

    def normalized(self) -> "QuotientRule":
        return QuotientRule(self.kind, self.q, self.qs, self.c, self.d, Fraction(1), Fraction(1))


def _num(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else _dec_or_frac(x)


def _dec_or_frac(x: Fraction) -> str:
    from .interval import _exact_decimal

    s = _exact_decimal(x)
    return s if s is not None else f"{x.numerator}/{x.denominator}"


# -- series -------------------------------------------------------------------


@dataclass(frozen=True)
class CoefficientSeries:
    """Materialized prefix a_0..a_max, optionally backed by a quotient rule."""

    entries: tuple[Fraction, ...]
    rule: Optional[QuotientRule] = None

    def __post_init__(self):
        if not self.entries:
            raise SeriesError("series needs at least a_0")
        for k, a in enumerate(self.entries):
            if a <= 0:
                raise SeriesError(f"coefficient a_{k} = {a} is not positive")

    @property
    def max_index(self) -> int:
        return len(self.entries) - 1

    @property
    def last_index(self) -> Optional[int]:
        """Largest index that exists at all (None: infinite series)."""
        if self.rule is None:
            return self.max_index
        return self.rule.last_index

    def coeff(self, k: int) -> Fraction:
        if k < 0:
            raise IndexError(k)
        if k < len(self.entries):
            return self.entries[k]
        if self.rule is None or (self.rule.last_index is not None and k > self.rule.last_index):
            raise IndexError(f"a_{k} is beyond the available data (max index {self.last_index})")
        return self.materialize(k).entries[k]

    def __getitem__(self, k: int) -> Fraction:
        return self.coeff(k)

    def materialize(self, n: int) -> "CoefficientSeries":
        """Same series with entries through index n."""
        if n < len(self.entries):
            return self
        if self.rule is None:
            raise SeriesError(f"series has no generator; cannot extend to index {n}")
        if self.rule.last_index is not None and n > self.rule.last_index:
            raise SeriesError(f"rule defines coefficients up to {self.rule.last_index}, asked for {n}")
        es = list(self.entries)
        while len(es) < 2:
            es.append(self.rule.a1)
        p_prev = es[-2] / es[-1]
        for k in range(len(es), n + 1):
            p_k = p_prev * self.rule.q_at(k)
            es.append(es[-1] / p_k)
            p_prev = p_k
        return CoefficientSeries(tuple(es), self.rule)

    def prefix(self, n: int) -> list[Fraction]:
        return list(self.materialize(n).entries[: n + 1])

    def p(self, n: int) -> Fraction:
        return self.coeff(n - 1) / self.coeff(n)

    def q(self, n: int) -> Fraction:
        if self.rule is not None:
            return self.rule.q_at(n)
        return self.coeff(n - 1) ** 2 / (self.coeff(n - 2) * self.coeff(n))


def series_from_rule(rule: QuotientRule, n: int = 1) -> CoefficientSeries:
    base = CoefficientSeries((rule.a0, rule.a1), rule)
    if rule.last_index is not None:
        n = min(n, rule.last_index)
    return base.materialize(max(n, 1))


def closed_form_coeff(rule: QuotientRule, n: int) -> Fraction:
    """a_n = a_1 / (q_2^{n-1} q_3^{n-2} ... q_n) * (a_1/a_0)^{n-1}, n >= 2."""
    if n == 0:
        return rule.a0
    if n == 1:
        return rule.a1
    den = Fraction(1)
    for k in range(2, n + 1):
        den *= rule.q_at(k) ** (n + 1 - k)
    return rule.a1 / den * (rule.a1 / rule.a0) ** (n - 1)


# -- loading ------------------------------------------------------------------


def parse_coefficient_text(text: str) -> CoefficientSeries:
    """Parse ``k value`` lines (``#`` comments and blank lines allowed)."""
    found: dict[int, Fraction] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise SeriesError(f"line {lineno}: expected 'k value', got {raw.strip()!r}")
        try:
            k = int(parts[0])
        except ValueError:
            raise SeriesError(f"line {lineno}: bad index {parts[0]!r}") from None
        if k < 0:
            raise SeriesError(f"line {lineno}: negative index {k}")
        try:
            v = to_fraction(parts[1])
        except SeriesError:
            raise SeriesError(f"line {lineno}: bad value {parts[1]!r}") from None
        if k in found:
            raise SeriesError(f"line {lineno}: duplicate index {k}")
        if v <= 0:
            raise SeriesError(f"index {k}: coefficient {parts[1]} is not positive (line {lineno})")
        found[k] = v
    if not found:
        raise SeriesError("no coefficients found")
    n = max(found)
    missing = [k for k in range(n + 1) if k not in found]
    if missing:
        raise SeriesError(f"indices must be contiguous from 0; missing {missing[:5]}")
    return CoefficientSeries(tuple(found[k] for k in range(n + 1)))


def load_series(source: Union[str, Path, dict, QuotientRule, CoefficientSeries],
                materialize: int = 1) -> CoefficientSeries:
    """Build a series from a coefficient file, a rule descriptor, or text.

    ``source`` may be a path to a coefficient file or a ``.json`` rule file,
    inline JSON rule text, a rule dict, or inline coefficient text.
    """
    if isinstance(source, CoefficientSeries):
        return source
    if isinstance(source, QuotientRule):
        return series_from_rule(source, materialize)
    if isinstance(source, dict):
        return series_from_rule(QuotientRule.from_json(source), materialize)
    text: str
    if isinstance(source, Path) or (isinstance(source, str) and "\n" not in source
                                     and not source.lstrip().startswith("{")
                                     and Path(source).exists()):
        path = Path(source)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise SeriesError(f"cannot read {path}: {exc}") from exc
    else:
        text = str(source)
    if text.lstrip().startswith("{"):
        return series_from_rule(QuotientRule.from_json(text), materialize)
    return parse_coefficient_text(text)


# -- quotient profiles --------------------------------------------------------


@dataclass(frozen=True)
class QuotientProfile:
    """p_1..p_N and q_2..q_N with monotonicity and limit metadata.

    ``monotone_flag`` is one of ``increasing``, ``decreasing``, ``constant``
    or ``neither``; all comparisons are non-strict, and a constant sequence
    is both increasing and decreasing.
    """

    p: tuple[Fraction, ...]
    q: tuple[Fraction, ...]
    monotone_flag: str
    strictly_increasing: bool
    strictly_decreasing: bool
    limit_estimate: Optional[Bracket]
    limit_is_analytic: bool
    notes: tuple[str, ...] = field(default=())

    @property
    def n_max(self) -> int:
        return len(self.p)

    def p_at(self, n: int) -> Fraction:
        return self.p[n - 1]

    def q_at(self, n: int) -> Fraction:
        return self.q[n - 2]

    @property
    def increasing(self) -> bool:
        return self.monotone_flag in ("increasing", "constant")

    @property
    def decreasing(self) -> bool:
        return self.monotone_flag in ("decreasing", "constant")


def _monotone(qs: Sequence[Fraction]) -> tuple[str, bool, bool]:
    inc = all(a <= b for a, b in zip(qs, qs[1:]))
    dec = all(a >= b for a, b in zip(qs, qs[1:]))
    s_inc = all(a < b for a, b in zip(qs, qs[1:]))
    s_dec = all(a > b for a, b in zip(qs, qs[1:]))
    if inc and dec:
        flag = "constant"
    elif inc:
        flag = "increasing"
    elif dec:
        flag = "decreasing"
    else:
        flag = "neither"
    return flag, s_inc and len(qs) > 1, s_dec and len(qs) > 1


def quotients(series: CoefficientSeries, n_max: int) -> QuotientProfile:
    """Second quotients q_2..q_{n_max} of a series."""
    if n_max < 2:
        raise SeriesError(f"n_max must be >= 2, got {n_max}")
    last = series.last_index
    if last is not None and n_max > last:
        raise SeriesError(f"series has coefficients up to index {last}; n_max={n_max} too large")
    s = series.materialize(n_max)
    a = s.entries
    p = tuple(a[n - 1] / a[n] for n in range(1, n_max + 1))
    q = tuple(p[n - 1] / p[n - 2] for n in range(2, n_max + 1))
    flag, s_inc, s_dec = _monotone(q)
    notes: list[str] = []
    rule = series.rule
    if rule is not None and rule.limit is not None:
        limit = Bracket.point(rule.limit)
        analytic = True
    else:
        last_q = q[-1]
        err = abs(q[-1] - q[-2]) if len(q) > 1 else Fraction(0)
        limit = Bracket(last_q - err, last_q + err)
        analytic = False
        notes.append("monotonicity and limit are read off a finite prefix (heuristic)")
    return QuotientProfile(p, q, flag, s_inc, s_dec, limit, analytic, tuple(notes))


def coeffs_from_quotients(q: Sequence, a0=1, a1=1) -> CoefficientSeries:
    """Rebuild a_0..a_N from q_2..q_N via a_n = a_0 / (p_1 ... p_n)."""
    if len(q) == 0:
        raise SeriesError("empty quotient list")
    rule = QuotientRule.from_list(q, a0, a1)
    return series_from_rule(rule, len(q) + 1)


def normalize(series: CoefficientSeries) -> CoefficientSeries:
    """g(z) = f(a_0 z / a_1) / a_0, so b_0 = b_1 = 1 with identical q_n."""
    a0, a1 = series.coeff(0), series.coeff(1)
    if series.rule is not None:
        rule = series.rule.normalized()
        return series_from_rule(rule, series.max_index)
    lam = a0 / a1
    return CoefficientSeries(tuple(a * lam**k / a0 for k, a in enumerate(series.entries)))
