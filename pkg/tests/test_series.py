import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from lpcert.series import (
    CoefficientSeries,
    QuotientRule,
    SeriesError,
    closed_form_coeff,
    coeffs_from_quotients,
    load_series,
    normalize,
    quotients,
    series_from_rule,
)

positive_q = st.fractions(min_value=Fraction(1, 5), max_value=8).filter(lambda x: x > 0)
positive_coeffs = st.lists(st.fractions(min_value=Fraction(1, 50), max_value=50).filter(lambda x: x > 0),
                           min_size=3, max_size=9)


def test_parse_inline_file_text():
    s = load_series("0 1\n1 1\n2 1/4\n")
    assert s.entries == (1, 1, Fraction(1, 4))


def test_parse_file_from_disk(tmp_path):
    path = tmp_path / "coeffs.txt"
    path.write_text("# a_k = 1/k!\n0 1\n1 1\n2 0.5\n3 1/6\n", encoding="utf-8")
    assert load_series(str(path)).entries == (1, 1, Fraction(1, 2), Fraction(1, 6))


def test_rule_constant_four_materialized():
    s = load_series({"type": "constant", "q": 4}, 3)
    assert s[3] == Fraction(1, 64)


def test_negative_coefficient_names_index():
    with pytest.raises(SeriesError, match="index 2"):
        load_series("0 1\n1 1\n2 -1/4\n")


def test_malformed_line_names_line_number():
    with pytest.raises(SeriesError, match="line 2"):
        load_series("0 1\n1 1 7\n")


def test_gap_in_indices_rejected():
    with pytest.raises(SeriesError, match="contiguous"):
        load_series("0 1\n2 1\n")


@pytest.mark.parametrize("rule", [
    '{"type": "limit-increasing", "c": 1, "d": 2}',  # q_2 = 0
    '{"type": "constant", "q": 0}',
    '{"type": "list", "q": []}',
    '{"type": "mystery"}',
    '{"type": "constant", "q": 2, "a0": -1}',
])
def test_bad_rules_rejected(rule):
    with pytest.raises(SeriesError):
        load_series(rule)


def test_quotients_partial_theta_coefficients_constant():
    s = CoefficientSeries(tuple(Fraction(1, 2 ** (k * k)) for k in range(12)))
    prof = quotients(s, 11)
    assert set(prof.q) == {4}
    assert prof.monotone_flag == "constant" and prof.increasing and prof.decreasing


def test_quotients_factorial():
    s = CoefficientSeries(tuple(Fraction(1, math.factorial(k)) for k in range(10)))
    prof = quotients(s, 9)
    assert list(prof.q) == [Fraction(n, n - 1) for n in range(2, 10)]
    assert prof.monotone_flag == "decreasing" and prof.strictly_decreasing


def test_quotients_all_ones():
    prof = quotients(CoefficientSeries((Fraction(1),) * 6), 5)
    assert set(prof.p) == {1} and set(prof.q) == {1}


def test_quotients_rejects_short_range():
    with pytest.raises(SeriesError):
        quotients(CoefficientSeries((Fraction(1),) * 6), 1)


def test_finite_prefix_limit_flagged_heuristic():
    prof = quotients(coeffs_from_quotients([3, 3.5, 3.6]), 4)
    assert not prof.limit_is_analytic
    assert prof.limit_estimate.contains(Fraction(36, 10))
    assert prof.notes


def test_rule_limit_is_analytic():
    prof = quotients(series_from_rule(QuotientRule.limit_increasing("3.2", "0.2"), 10), 10)
    assert prof.limit_is_analytic and prof.limit_estimate.lo == prof.limit_estimate.hi == Fraction(16, 5)
    assert prof.monotone_flag == "increasing"


def test_coeffs_from_constant_four():
    s = coeffs_from_quotients([4] * 8)
    assert list(s.entries) == [Fraction(1, 4 ** (k * (k - 1) // 2)) for k in range(10)]


def test_coeffs_from_three_four():
    s = coeffs_from_quotients([3, 4])
    assert s[2] == Fraction(1, 3) and s[3] == Fraction(1, 36)


def test_coeffs_from_ones():
    assert set(coeffs_from_quotients([1] * 5).entries) == {1}


def test_coeffs_from_empty_rejected():
    with pytest.raises(SeriesError):
        coeffs_from_quotients([])


def test_normalize_example():
    s = normalize(CoefficientSeries((Fraction(4), Fraction(2), Fraction(1))))
    assert s.entries == (1, 1, 1)


def test_normalize_identity_on_normalized():
    s = CoefficientSeries((Fraction(1), Fraction(1), Fraction(1, 3), Fraction(1, 36)))
    assert normalize(s) == s


@given(positive_coeffs)
def test_normalize_preserves_quotients(entries):
    s = CoefficientSeries(tuple(entries))
    n = len(entries) - 1
    assert quotients(normalize(s), n).q == quotients(s, n).q


@given(positive_coeffs)
def test_round_trip_through_quotients(entries):
    s = CoefficientSeries(tuple(entries))
    n = len(entries) - 1
    rebuilt = coeffs_from_quotients(quotients(s, n).q, 1, 1)
    assert rebuilt.entries == normalize(s).entries


@given(st.lists(positive_q, min_size=1, max_size=8), positive_q, positive_q)
def test_generator_matches_closed_form(qs, a0, a1):
    rule = QuotientRule.from_list(qs, a0, a1)
    s = series_from_rule(rule, len(qs) + 1)
    for n in range(len(qs) + 2):
        assert s[n] == closed_form_coeff(rule, n)


@given(st.lists(positive_q, min_size=1, max_size=8))
def test_quotients_reproduce_input(qs):
    assert list(quotients(coeffs_from_quotients(qs), len(qs) + 1).q) == [Fraction(q) for q in qs]


def test_rule_json_round_trip():
    rule = QuotientRule.limit_increasing("3.2", "0.2", a0=2, a1=3)
    assert QuotientRule.from_json(rule.to_json()) == rule


def test_decimal_inputs_are_exact():
    rule = QuotientRule.from_json('{"type": "constant", "q": 3.1}')
    assert rule.q_at(7) == Fraction(31, 10)
