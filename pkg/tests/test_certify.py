import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

import oracles
from lpcert.certify import (
    INCONCLUSIVE,
    IN_LP,
    NOT_IN_LP,
    apolarity_residual,
    certify_not_lp,
    classify,
    domination_row,
    grace_apolar_witness,
    hutchinson_check,
    lemma_q2_floor,
    phi_circle_function,
    phi_coeffs,
    positivity_on_segment,
    rouche_margin,
    s4_circle_min,
    s4_coeffs,
    tail_bound_r5,
)
from lpcert.series import CoefficientSeries, QuotientRule
from lpcert.theta import ThetaParams, theta_in_lp
from lpcert.winding import winding_number

F = Fraction
in_range = st.fractions(min_value=3, max_value=F(399, 100), max_denominator=100)


def ordered_triple():
    return st.tuples(in_range, in_range, in_range).map(sorted).map(tuple)


def lemma_from_q(q2, q3):
    return lemma_q2_floor(1, 1, 1 / F(q2), 1 / (F(q2) ** 2 * F(q3)))


# -- q2 floor --------------------------------------------------------------------------------


def test_lemma_boundary_three():
    lem = lemma_q2_floor(1, 1, F(1, 3), F(1, 27))
    assert lem.reduced == 0 and lem.residual == 0 and lem.verdict == INCONCLUSIVE and lem.boundary


def test_lemma_negative_residual():
    lem = lemma_from_q(F(29, 10), F(29, 10))
    assert lem.reduced == F(-19, 100) and lem.verdict == NOT_IN_LP


def test_lemma_positive_residual():
    lem = lemma_from_q(F(7, 2), 4)
    assert lem.reduced == 1 and lem.verdict == INCONCLUSIVE


def test_lemma_power_sum_catches_small_q2():
    lem = lemma_from_q(F(3, 2), F(3, 2))
    assert lem.power_sum < 0 and not lem.q2_at_least_2 and lem.verdict == NOT_IN_LP
    assert "power sum" in lem.failure


def test_lemma_silent_without_monotonicity():
    assert lemma_q2_floor(1, 1, F(1, 2), F(1, 8), increasing=False).verdict == INCONCLUSIVE


@given(st.fractions(min_value=F(1, 10), max_value=10), st.fractions(min_value=F(1, 10), max_value=10),
       st.fractions(min_value=F(1, 10), max_value=10), st.fractions(min_value=F(1, 10), max_value=10))
def test_lemma_scale_invariance_and_sign(a0, a1, q2, q3):
    a2 = a1 * a1 / (a0 * q2)
    a3 = a2 * a2 / (a1 * q3)
    lem = lemma_q2_floor(a0, a1, a2, a3)
    assert lem.reduced == q3 * (q2 - 4) + 3
    assert lem.residual == (a1 / a0) ** 4 * lem.reduced / (q2 * q2 * q3)
    assert (lem.residual < 0) == (lem.reduced < 0)
    assert lem.power_sum == (a1 / a0) ** 2 * (1 - 2 / q2)


# -- positivity on [0, q2] ---------------------------------------------------------------------


def phi_samples(rule, hi, n=2001, degree=80):
    cs = oracles.phi_coefficients(rule.q_at, degree)
    with mpmath.workdps(40):
        mp = [mpmath.mpf(c.numerator) / c.denominator for c in cs]
        xs = [mpmath.mpf(hi) * j / (n - 1) for j in range(n)]
        return [mpmath.polyval(mp[::-1], x) for x in xs]


@pytest.mark.parametrize("rule", [QuotientRule.constant(F(31, 10)), QuotientRule.limit_increasing("3.2", "0.2")])
def test_positivity_witness(rule):
    w = positivity_on_segment(rule)
    assert w.holds and w.section_degree == 2 * w.m + 1
    assert min(phi_samples(rule, float(rule.q_at(2)))) > 0


def test_phi_at_one_positive_when_terms_decrease():
    rule = QuotientRule.limit_increasing(3, 1)
    cs = phi_coeffs(rule, 40)
    assert sum(cs) > 0 and all(abs(a) > abs(b) for a, b in zip(cs[1:], cs[2:]))


def test_positivity_refuses_limit_above_qinf():
    with pytest.raises(Exception, match="q_inf"):
        positivity_on_segment(QuotientRule.limit_increasing(4, 1))


@settings(max_examples=60)
@given(st.fractions(min_value=3, max_value=F(323, 100), max_denominator=100),
       st.lists(st.fractions(min_value=0, max_value=F(1, 5), max_denominator=100), min_size=8, max_size=8),
       st.integers(1, 4))
def test_domination_rows_imply_pair_inequality(q2, steps, k):
    c = F(323, 100)
    qs = [q2]
    for s in steps:
        qs.append(min(c, qs[-1] + s))
    q = {i + 2: v for i, v in enumerate(qs)}
    q.update({i: c for i in range(len(qs) + 2, 2 * k + 3)})
    row = domination_row(q.__getitem__, k)
    assume(row.holds)

    def pair(qfun, x):
        a, p = F(1), F(1)
        for i in range(2, 2 * k + 2):
            p *= qfun(i)
            a /= p
            if i == 2 * k:
                even = a
        return even * x ** (2 * k) - a * x ** (2 * k + 1)

    for x in np.linspace(1, float(q2), 9):
        x = F(x)
        assert pair(q.__getitem__, x) >= pair(lambda i: c, x)


# -- circle minimum and tail --------------------------------------------------------------------


@pytest.mark.parametrize("q, bound", [((3, 3, 3), F(1, 9)),
                                      ((F(16, 5), F(33, 10), F(17, 5)), F(32, 10) / (F(33, 10) ** 2 * F(34, 10))),
                                      ((F(39, 10),) * 3, 1 / F(39, 10) ** 2)])
def test_circle_min_examples(q, bound):
    chk = s4_circle_min(*q)
    assert chk.bound == bound and chk.exact and chk.holds
    dense = min(oracles.circle_samples(s4_coeffs(*q), float(q[0])))
    assert dense >= float(bound) * (1 - 1e-12)


def test_circle_min_bound_attained_for_equal_quotients():
    assert s4_circle_min(3, 3, 3).sampled_min_sq == F(1, 81)


@pytest.mark.parametrize("q", [(F(5, 2), 3, 3), (4, 4, 4), (3, F(29, 10), 4)])
def test_circle_min_rejects_out_of_range(q):
    with pytest.raises(ValueError):
        s4_circle_min(*q)


def test_tail_example_and_margin():
    t = tail_bound_r5(3, 3, 3)
    assert t.bound == F(1, 240) and t.holds
    assert s4_circle_min(3, 3, 3).bound > t.bound
    assert rouche_margin(3, 3, 3) == F(1, 9) - F(1, 240)


def test_tail_sampled_against_independent_sum():
    q2, q3, q4 = F(31, 10), F(63, 20), F(16, 5)
    t = tail_bound_r5(q2, q3, q4)
    qfun = {2: q2, 3: q3, 4: q4}.get
    cs = oracles.phi_coefficients(lambda i: qfun(i) or q4, 60)
    cs[:5] = [F(0)] * 5
    ref = max(oracles.circle_samples(cs, float(q2), n=1024))
    assert t.holds and ref <= float(t.bound)
    assert abs(ref - t.sampled_max) < 1e-9


@settings(max_examples=40)
@given(ordered_triple())
def test_margin_positive_on_random_triples(q):
    assert rouche_margin(*q) > 0
    assert tail_bound_r5(*q, mesh=128).holds


# -- apolar witness --------------------------------------------------------------------------------


def apolarity_by_definition(p, b):
    n = 4
    a = [F(c) / math.comb(n, k) for k, c in enumerate(p)]
    bb = [F(c) / math.comb(n, k) for k, c in enumerate(b)]
    return sum((-1) ** k * math.comb(n, k) * a[k] * bb[n - k] for k in range(n + 1))


def test_grace_at_three():
    g = grace_apolar_witness(3, 3, 3)
    assert sorted(g.roots) == [0, 0, 3, 3] and g.roots_in_disk and g.residual == 0 and g.holds


def test_grace_fourth_root_near_qinf():
    g = grace_apolar_witness(F("3.2336"), F("3.3"), F("3.4"))
    assert sorted(g.roots) == [0, 0, F("2.2992"), F("3.2336")]
    assert g.roots_in_disk


def test_grace_rejects_small_q2():
    with pytest.raises(ValueError):
        grace_apolar_witness(F(29, 10), 3, 3)


@settings(max_examples=40)
@given(ordered_triple())
def test_grace_apolarity_and_counts(q):
    g = grace_apolar_witness(*q)
    # the partner's coefficients come from Q = sum C(4,k) b_k z^k with the stored b
    Q = [math.comb(4, k) * b for k, b in enumerate(g.b)]
    assert apolarity_by_definition(s4_coeffs(*q), Q) == 0 == g.residual
    assert apolarity_residual(s4_coeffs(*q), g.b) == 0
    assert g.s4_inside >= 1
    # Rouche consistency: phi (with q_k = q_4 beyond) has as many zeros inside
    rule = QuotientRule.from_list(list(q) + [q[2]] * 60)
    assert winding_number(phi_circle_function(rule, q[0]), q[0]) == g.s4_inside


# -- full pipeline -----------------------------------------------------------------------------


def test_certificate_constant_rule_agrees_with_theta():
    res = certify_not_lp(QuotientRule.constant(F(31, 10)))
    assert res.verdict == NOT_IN_LP and res.certificate.valid
    assert theta_in_lp(ThetaParams.from_a2(F(31, 10))).in_lp is False


def test_certificate_limit_increasing_rule():
    res = certify_not_lp(QuotientRule.limit_increasing("3.2", "0.2"))
    cert = res.certificate
    assert res.verdict == NOT_IN_LP and cert.valid
    assert cert.q2 == F(31, 10) and cert.limit == F(16, 5)
    assert cert.rouche_margin > 0 and cert.grace.residual == 0 and cert.positivity.holds
    assert cert.oracle.degree <= 80 and cert.oracle.nonreal >= 2
    assert cert.phi_inside == cert.grace.s4_inside


def test_certificate_gate_on_limit():
    res = certify_not_lp(QuotientRule.limit_increasing(4, 1))
    assert res.verdict == INCONCLUSIVE and res.hypothesis == "c < q_inf"


def test_certificate_refuses_finite_data():
    res = certify_not_lp(CoefficientSeries((F(1), F(1), F(1, 3), F(1, 27))))
    assert res.verdict == INCONCLUSIVE and res.hypothesis == "limit"


def test_certificate_refuses_decreasing_rule():
    res = certify_not_lp(QuotientRule.limit_increasing("3.2", "-0.2"))
    assert res.verdict == INCONCLUSIVE and "increasing" in res.hypothesis


def test_certificate_lemma_shortcut():
    res = certify_not_lp(QuotientRule.constant(F(29, 10)))
    assert res.verdict == NOT_IN_LP and res.certificate is None and res.lemma.residual < 0


def test_certificate_boundary_q2_three_flagged():
    res = certify_not_lp(QuotientRule.constant(3), oracle=False)
    assert res.verdict == NOT_IN_LP and res.certificate.boundary and res.certificate.notes


def test_finite_list_without_rule_is_never_certified():
    res = certify_not_lp(QuotientRule.from_list([F(31, 10)] * 10))
    assert res.verdict == INCONCLUSIVE


# -- Hutchinson -------------------------------------------------------------------------------


def test_hutchinson_theta_coefficients():
    s = CoefficientSeries(tuple(F(1, 2 ** (k * k)) for k in range(9)))
    rep = hutchinson_check(s, 8)
    assert rep.q_condition and rep.sections_real_rooted and rep.pieces_nonpositive and rep.passed
    for p in rep.sections + rep.pieces:
        coeffs = list(s.entries[p.m: p.n + 1])
        assert p.Z_c == oracles.nonreal_count(coeffs) == 0


def test_hutchinson_q_below_four_exhibits_section():
    rep = hutchinson_check(QuotientRule.constant(F(39, 10)), 4)
    assert not rep.q_condition and rep.first_failure == 2
    assert rep.exhibit.n == 2 and rep.exhibit.m == 0 and rep.exhibit.Z_c == 2


def test_hutchinson_exponential():
    s = CoefficientSeries(tuple(F(1, math.factorial(k)) for k in range(7)))
    rep = hutchinson_check(s, 6)
    assert not rep.q_condition and rep.q_min == F(6, 5)
    assert rep.exhibit.n == 2 and rep.exhibit.Z_c == 2


@settings(max_examples=25)
@given(st.lists(st.fractions(min_value=4, max_value=12, max_denominator=10), min_size=6, max_size=6))
def test_hutchinson_pieces_nonpositive_for_large_quotients(qs):
    rep = hutchinson_check(QuotientRule.from_list(qs), 7)
    assert rep.q_condition and rep.sections_real_rooted and rep.pieces_nonpositive


# -- classifier ----------------------------------------------------------------------------


@pytest.mark.parametrize("rule, verdict, branch", [
    (QuotientRule.constant(4), IN_LP, "hutchinson"),
    (QuotientRule.limit_increasing("3.5", "-1"), IN_LP, "decreasing-limit"),
    (QuotientRule.limit_increasing("3.2", "0.2"), NOT_IN_LP, "certificate"),
    (QuotientRule.constant(F(29, 10)), NOT_IN_LP, "q2-floor"),
])
def test_classify_branches(rule, verdict, branch):
    res = classify(rule)
    assert (res.verdict, res.branch) == (verdict, branch)


def test_classify_decreasing_below_qinf_inconclusive_with_note():
    res = classify(QuotientRule.limit_increasing(3, -1))
    assert res.verdict == INCONCLUSIVE
    assert any("lim inf" in n for n in res.notes)


def test_classify_finite_list_reports_exact_census():
    res = classify(CoefficientSeries((F(1), F(1), F(1, 3), F(1, 30))))
    assert res.verdict in (INCONCLUSIVE, NOT_IN_LP)
