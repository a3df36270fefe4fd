import csv
import io
import json
from fractions import Fraction

import pytest

from lpcert.cli import EXIT_INCONCLUSIVE, EXIT_INPUT, EXIT_OK, EXIT_PRECISION, RunConfig, run
from lpcert.interval import parse_pm
from lpcert.series import SeriesError

RULE_32 = '{"type":"limit-increasing","c":3.2,"d":0.2}'


def call(*argv):
    buf = io.StringIO()
    code = run(list(argv), stdout=buf)
    return code, buf.getvalue()


@pytest.fixture
def coeff_file(tmp_path):
    path = tmp_path / "coeffs.txt"
    path.write_text("".join(f"{k} 1/{2 ** (k * k)}\n" for k in range(21)), encoding="utf-8")
    return path


def test_quotients_csv(coeff_file):
    code, out = call("quotients", "--file", str(coeff_file), "--n-max", "20", "--format", "csv")
    rows = list(csv.reader(io.StringIO(out)))
    assert code == EXIT_OK and rows[0] == ["n", "p_n", "q_n"] and len(rows) == 21
    assert all(parse_pm(r[2]).lo == 4 for r in rows[2:])


def test_global_flags_after_subcommand(coeff_file):
    a = call("--format", "json", "quotients", "--file", str(coeff_file), "--n-max", "5")
    b = call("quotients", "--file", str(coeff_file), "--n-max", "5", "--format", "json")
    assert a == b and json.loads(a[1])["monotone"] == "constant"


def test_theta_cn_around_four():
    code, out = call("theta", "cn", "--n", "2", "--tol", "1e-9", "--format", "json")
    b = parse_pm(json.loads(out)["constants"][0]["c_n"])
    assert code == EXIT_OK and b.lo - Fraction(1, 10**9) <= 4 <= b.hi + Fraction(1, 10**9)


def test_theta_csv_columns():
    code, out = call("theta", "cn", "--n", "2", "3", "--tol", "1e-6", "--format", "csv")
    assert out.splitlines()[0] == "n,c_n_lo,c_n_hi" and len(out.splitlines()) == 3


def test_certify_then_verify(tmp_path):
    path = tmp_path / "cert.json"
    code, _ = call("certify", "--rule", RULE_32, "--format", "json", "--out", str(path))
    assert code == EXIT_OK and path.exists()
    meta = json.loads((tmp_path / "cert.json.meta.json").read_text())
    assert meta["command"] == "certify" and meta["exit_status"] == 0
    assert "finished_utc" not in path.read_text()
    code, out = call("verify", str(path))
    assert code == EXIT_OK and "certificate VERIFIED" in out


def test_certificate_bytes_deterministic(tmp_path):
    outs = []
    for name in ("a.json", "b.json"):
        call("certify", "--rule", '{"type":"constant","q":3.1}', "--no-oracle", "--format", "json",
             "--out", str(tmp_path / name))
        outs.append((tmp_path / name).read_bytes())
    assert outs[0] == outs[1]


def test_certify_gate_is_inconclusive():
    code, out = call("certify", "--rule", '{"type":"limit-increasing","c":4,"d":1}')
    assert code == EXIT_INCONCLUSIVE and "INCONCLUSIVE" in out


def test_classify_exit_codes():
    assert call("classify", "--rule", '{"type":"constant","q":4}')[0] == EXIT_OK
    assert call("classify", "--rule", '{"type":"limit-increasing","c":3,"d":-1}')[0] == EXIT_INCONCLUSIVE


@pytest.mark.parametrize("argv", [
    ("quotients",),
    ("quotients", "--file", "/nonexistent/file.txt"),
    ("classify", "--rule", "{not json"),
    ("classify", "--rule", '{"type":"constant","q":-1}'),
    ("theta", "cn", "--n", "2", "--tol", "-1"),
    ("theta", "cn", "--n", "1"),
    ("sturm", "--coeffs", "0"),
    ("czds", "--coeffs", "1,2,1", "--gamma", "1"),
    ("unknown-command",),
    ("quotients", "--format", "xml"),
])
def test_input_errors(argv):
    assert call(*argv)[0] == EXIT_INPUT


def test_precision_cap_exit():
    assert call("theta", "eval", "--a2", "3", "--x", "-2", "--tol", "1e-2000")[0] == EXIT_PRECISION


def test_sturm_and_czds_json():
    code, out = call("sturm", "--coeffs", "1,1,1/4", "--format", "json")
    data = json.loads(out)
    assert code == EXIT_OK and data["Z_c"] == 0 and data["brackets"][0]["multiplicity"] == 2
    code, out = call("czds", "--coeffs", "1,6,15,20,15,6,1", "--gamma-kind", "factorial", "--format", "json")
    assert json.loads(out) == {"Z_c_before": 0, "Z_c_after": 0, "satisfied": True}


def test_hutchinson_command():
    code, out = call("hutchinson", "--rule", '{"type":"constant","q":3.9}', "--N", "4", "--format", "json")
    data = json.loads(out)
    assert code == EXIT_OK and not data["q_condition"] and data["exhibit"]["Z_c"] == 2


def test_run_config_validation():
    with pytest.raises(SeriesError):
        RunConfig("theta", tol=Fraction(0))
    with pytest.raises(SeriesError):
        RunConfig("theta", jobs=0)


def test_jobs_flag_gives_same_constants():
    a = call("theta", "cn", "--n", "4", "5", "--tol", "1e-6", "--format", "json")
    b = call("theta", "cn", "--n", "4", "5", "--tol", "1e-6", "--format", "json", "--jobs", "2")
    assert a == b
