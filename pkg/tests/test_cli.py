import csv
import io
import json
import math

import pytest

from airyasym import cli


def run(*argv):
    out = io.StringIO()
    code = cli.main(list(argv), out)
    return code, out.getvalue()


def test_eval_gi_both():
    code, text = run("eval", "--fn", "gi", "--x", "10", "--mode", "both", "--json")
    report = json.loads(text)
    assert code == 0
    assert float(report["rel_err"]) < 1e-6
    assert {"value", "error_estimate", "truncation_index", "oracle", "rel_err"} <= set(report)


def test_eval_leading_term_only():
    code, text = run("eval", "--fn", "ai", "--x", "10", "--truncation", "1", "--json")
    report = json.loads(text)
    assert code == 0 and report["truncation_index"] == 1
    zeta = 2 * 10**1.5 / 3
    assert float(report["value"]) == pytest.approx(math.sqrt(math.pi) / 2 * 10**-0.25 * math.exp(-zeta), rel=1e-12)


def test_eval_hi_negative():
    code, text = run("eval", "--fn", "hi", "--x", "-10", "--mode", "both", "--json")
    report = json.loads(text)
    assert code == 0 and float(report["rel_err"]) < 1e-6


def test_eval_csv():
    code, text = run("--format", "csv", "eval", "--fn", "bi", "--x", "8")
    rows = list(csv.reader(io.StringIO(text)))
    assert code == 0 and "value" in rows[0] and len(rows) == 2


def test_stokes_anti_stokes_ray(tmp_path):
    code, text = run("stokes", "--z-abs", "10", "--z-phase", "1.0471975", "--emit", str(tmp_path))
    summary = json.loads(text)
    assert code == 0
    assert summary["representation"] == "W12+W23" and not summary["stokes_ray"]
    assert json.loads((tmp_path / "summary.json").read_text()) == summary
    with open(tmp_path / "contours.csv") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["contour_id", "saddle", "t_re", "t_im", "re_f", "im_f"]
    assert len(rows) > 10


def test_stokes_on_ray():
    code, text = run("stokes", "--z-abs", "10", "--z-phase", "0")
    summary = json.loads(text)
    assert code == 0 and summary["stokes_ray"] and summary["representation"] == "HalfSum"


def test_integral_with_closed_form(tmp_path):
    spec = tmp_path / "h.json"
    spec.write_text(json.dumps({"f": {"-1": 1}, "closed_form": "sqrt(-v) / sqrt(y)"}))
    code, text = run("integral", "--kernel", "ai", "--coeffs", str(spec), "--v", "-15", "--levels", "3")
    report = json.loads(text)
    assert code == 0
    assert float(report["rel_err"]) < 1e-4
    assert report["terms_used"]["levels"] == 3
    assert report["derivatives_at_0"]["0"]["denominator"]


def test_integral_bad_expression(tmp_path):
    spec = tmp_path / "h.json"
    spec.write_text(json.dumps({"f": {"0": 1}, "closed_form": "nosuch(y)"}))
    code, _ = run("integral", "--coeffs", str(spec), "--v", "-15", "--levels", "2")
    assert code == 3


def test_integral_missing_file(tmp_path):
    code, _ = run("integral", "--coeffs", str(tmp_path / "none.json"), "--v", "-15")
    assert code == 2


def test_coefficients_csv():
    code, text = run("coefficients", "c", "2")
    assert code == 0
    assert text.splitlines() == ["index,numerator,denominator", "0,1,1", "1,5,72", "2,385,10368"]


def test_emit_coefficients():
    code, text = run("--emit-coefficients", "g", "1")
    assert code == 0 and text.splitlines()[-1] == "1,-5,24"


def test_oracle_csv():
    code, text = run("--digits", "20", "--oracle", "Ai", "0", "1+2i")
    rows = list(csv.reader(io.StringIO(text)))
    assert code == 0
    assert rows[0] == ["function", "z_re", "z_im", "value_re", "value_im", "digits"]
    assert len(rows) == 3 and rows[2][2].startswith("2")


@pytest.mark.parametrize("argv", [
    ("eval", "--fn", "zeta", "--x", "1"),
    ("eval", "--fn", "ai", "--x", "abc"),
    ("eval", "--fn", "ai", "--x", "5", "--truncation", "many"),
    ("--digits", "2", "eval", "--fn", "ai", "--x", "5"),
    ("stokes", "--z-abs", "-1", "--z-phase", "0"),
    ("coefficients", "c", "100000"),
    ("nosuchcommand",),
    (),
])
def test_usage_errors(argv):
    assert run(*argv)[0] == 2


def test_verify_identities():
    code, text = run("verify", "identities")
    assert code == 0
    assert text.startswith("1..8")
    assert "c-d convolution identity s=1..25 PASS" in text
    assert "not ok" not in text


def test_verify_stokes():
    code, text = run("verify", "stokes")
    assert code == 0 and "saddle count" in text


def test_failing_check_gives_exit_1(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"tolerances": {"integral_rel": 1e-30}}))
    code, text = run("--config", str(cfg), "verify", "integrals")
    assert code == 1 and "not ok" in text


def test_unknown_config_key(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"colour": "blue"}))
    assert run("--config", str(cfg), "verify", "identities")[0] == 2


def test_runs_are_deterministic(tmp_path):
    a = run("--seed", "3", "verify", "identities")
    b = run("--seed", "3", "verify", "identities")
    assert a == b
    assert run("eval", "--fn", "gi", "--x", "7", "--mode", "both") == run("eval", "--fn", "gi", "--x", "7", "--mode", "both")
