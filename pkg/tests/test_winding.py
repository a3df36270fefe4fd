import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from lpcert.certify import phi_circle_function, s4_coeffs
from lpcert.poly import RealPolynomial
from lpcert.roots import companion_roots
from lpcert.series import QuotientRule
from lpcert.winding import CircleFunction, WindingInconclusive, winding_details, winding_number


def test_monomial():
    assert winding_number(CircleFunction([0, 0, 0, 1]), 1) == 3


def test_exp_truncation_with_tail():
    cs = [Fraction(1, math.factorial(k)) for k in range(30)]
    tail = Fraction(2 * 2**30, math.factorial(30))  # crude bound for |z| = 2
    assert winding_number(CircleFunction(cs, tail), 2) == 0


def test_phi_matches_s4_for_constant_rule():
    q = Fraction(31, 10)
    rule = QuotientRule.constant(q)
    w_phi = winding_number(phi_circle_function(rule, q), q)
    w_s4 = winding_number(CircleFunction(s4_coeffs(q, q, q)), q)
    inside = sum(1 for z in companion_roots(s4_coeffs(q, q, q)) if abs(z) < float(q))
    assert w_phi == w_s4 == inside


def test_root_on_circle_is_inconclusive():
    with pytest.raises(WindingInconclusive):
        winding_details(CircleFunction([-1, 0, 1]), 1, start=64, cap=1024)


def test_result_carries_certification_data():
    res = winding_details(CircleFunction([1, 3, 1]), Fraction(1, 2))
    assert res.count == 1 and res.min_modulus > 0 and res.arcs >= 64


@settings(max_examples=60)
@given(st.lists(st.complex_numbers(max_magnitude=3), min_size=1, max_size=6),
       st.lists(st.fractions(min_value=-4, max_value=4, max_denominator=6), max_size=4),
       st.sampled_from([Fraction(1, 2), Fraction(1), Fraction(7, 4), Fraction(5, 2)]))
def test_winding_counts_constructed_zeros(pairs, reals, r):
    # keep zeros well away from the circle so the count is unambiguous
    pairs = [complex(round(z.real, 2), round(z.imag, 2)) for z in pairs]
    pairs = [z for z in pairs if abs(abs(z) - float(r)) > 0.05 and abs(z.imag) > 0.01]
    reals = [x for x in reals if abs(abs(x) - r) > Fraction(1, 20)]
    p = RealPolynomial.from_roots(reals) if reals else RealPolynomial([1])
    for z in pairs:
        re, im = Fraction(z.real), Fraction(z.imag)
        p = p * RealPolynomial([re * re + im * im, -2 * re, 1])
    if p.degree == 0:
        return
    expected = sum(2 for z in pairs if abs(z) < float(r)) + sum(1 for x in reals if abs(x) < r)
    assert winding_number(CircleFunction(p.coeffs), r) == expected
