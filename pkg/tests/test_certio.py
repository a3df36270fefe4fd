import copy
import json
import re
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from lpcert.certify import certify_not_lp
from lpcert.certio import certificate_to_json, dumps, verify_certificate
from lpcert.interval import format_exact, format_pm, parse_exact, parse_pm
from lpcert.series import QuotientRule


@pytest.fixture(scope="module")
def cert_json():
    res = certify_not_lp(QuotientRule.limit_increasing("3.2", "0.2"))
    return json.loads(dumps(certificate_to_json(res.certificate)))


def _all_strings(obj):
    if isinstance(obj, dict):
        for v in obj.values():
            yield from _all_strings(v)
    elif isinstance(obj, list):
        for v in obj:
            yield from _all_strings(v)
    else:
        yield obj


def test_no_bare_floats(cert_json):
    assert not any(isinstance(v, float) for v in _all_strings(cert_json))


def test_numbers_carry_radii(cert_json):
    for key in ("q2", "q3", "q4", "limit", "qinf", "rouche_margin"):
        assert "±" in cert_json[key]
    assert cert_json["conclusion"] == "NOT_IN_LP"


def test_required_fields_present(cert_json):
    for key in ("lemma_q2_floor", "positivity_witness", "circle_lower_bound", "tail_upper_bound",
                "rouche_margin", "grace_witness"):
        assert key in cert_json
    assert parse_exact(cert_json["grace_witness"]["apolarity_residual"]) == 0


def test_verify_accepts(cert_json):
    rep = verify_certificate(cert_json)
    assert rep.ok, rep.lines()
    assert len(rep.checks) >= 20


def test_serialization_deterministic():
    rule = QuotientRule.constant(Fraction(31, 10))
    a = dumps(certificate_to_json(certify_not_lp(rule, oracle=False).certificate))
    b = dumps(certificate_to_json(certify_not_lp(rule, oracle=False).certificate))
    assert a == b


@pytest.mark.parametrize("path, value", [
    (("q2",), "3.2 ± 0"),
    (("rouche_margin",), "1 ± 0"),
    (("grace_witness", "b"), ["0 ± 0", "0 ± 0", "1 ± 0", "-1 ± 0", "1 ± 0"]),
    (("rule",), {"type": "limit-increasing", "c": "3.25", "d": "0.2"}),
    (("lemma_q2_floor", "residual"), "-1 ± 0"),
    (("circle_lower_bound", "value"), "1 ± 0"),
])
def test_verify_rejects_tampering(cert_json, path, value):
    bad = copy.deepcopy(cert_json)
    node = bad
    for k in path[:-1]:
        node = node[k]
    node[path[-1]] = value
    assert not verify_certificate(bad, winding=False).ok


def test_verify_rejects_moved_breakpoint(cert_json):
    bad = copy.deepcopy(cert_json)
    pts = bad["positivity_witness"]["direct_cover"]["breakpoints"]
    pts[:] = pts[::2]  # coarser cover: some box can no longer be certified, or order breaks
    bad["positivity_witness"]["section_cover"]["breakpoints"] = []
    assert not verify_certificate(bad, winding=False).ok


def test_verify_rejects_garbage():
    assert not verify_certificate({"rule": "not a rule"}).ok


@given(st.fractions(max_denominator=10**6), st.fractions(min_value=0, max_value=1, max_denominator=10**4))
def test_pm_round_trip_encloses(value, radius):
    b = parse_pm(format_pm(value, radius))
    assert b.lo <= value - radius and value + radius <= b.hi


@given(st.fractions(max_denominator=10**9))
def test_exact_round_trip(value):
    text = format_exact(value)
    assert parse_exact(text) == value
    assert re.fullmatch(r"-?[0-9./]+ ± 0", text)
