import json
import subprocess
import sys

import pytest

from hypogevrey.cli import main
from hypogevrey.report import TOP_LEVEL_KEYS, validate

HEAT = "i*x1 + x2^2"
FAST = ["--witness-count", "3", "--jmax", "5", "--orders", "4"]


def run_cli(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, err = run_cli(capsys, *argv, "--format", "json")
    report = json.loads(out)
    validate(report)
    return code, report, out


@pytest.fixture(scope="module")
def heat_verify():
    proc = subprocess.run(
        [sys.executable, "-m", "hypogevrey", "verify", HEAT, "--format", "json", *FAST],
        capture_output=True,
        text=True,
        check=False,
    )
    return proc


def test_analyze_heat(capsys):
    code, rep, _ = run_json(capsys, "analyze", HEAT, "--denom-max", "4")
    assert code == 0
    assert rep["classification"]["hypoelliptic"]["kind"] == "holds"
    assert rep["hypo"]["sigma"] == 4
    assert rep["hypo"]["q_operator"] == "x2^4 + x1^2 + 1"
    assert rep["hypo"]["gevrey"]["paper_class"]["s"] == "4/1"
    assert rep["hypo"]["gevrey"]["sharp_class"]["s"] == "1/1"
    assert set(rep) <= set(TOP_LEVEL_KEYS)


def test_classify_only(capsys):
    code, rep, _ = run_json(capsys, "classify", "x1^2 + x2^2")
    assert code == 0
    assert "hypo" not in rep and "verification" not in rep
    assert rep["classification"]["mq"]["kind"] == "holds"


def test_not_hypoelliptic_exit_code(capsys):
    code, rep, _ = run_json(capsys, "analyze", "x1^2 - x2^2")
    assert code == 2
    assert rep["classification"]["hypoelliptic"]["kind"] == "fails"
    assert rep["hypo"]["error"] == "not hypoelliptic"


def test_grid_exhausted_exit_code(capsys):
    code, rep, _ = run_json(capsys, "hpoly", HEAT, "--denom-max", "1")
    assert code == 3
    assert "polyhedron" not in rep and "classification" not in rep
    assert rep["hypo"]["error"]


def test_parse_error_reports_position(capsys):
    code, out, err = run_cli(capsys, "analyze", "x1^2 + * x2")
    assert code == 1
    assert out == ""
    assert "position 7" in err


@pytest.mark.parametrize(
    "argv",
    [
        ["analyze"],
        ["bogus", HEAT],
        ["analyze", HEAT, "--dim", "1"],
        ["analyze", HEAT, "--exp-cap", "abc"],
        ["verify", HEAT, "--box", "0,1"],
        ["analyze", HEAT, "--rmin", "5", "--rmax", "1"],
    ],
)
def test_usage_errors(capsys, argv):
    code, _, err = run_cli(capsys, *argv)
    assert code == 1
    assert err


def test_text_output(capsys):
    code, out, _ = run_cli(capsys, "analyze", HEAT, "--denom-max", "4")
    assert code == 0
    assert "numerical evidence, not proof" in out
    assert "(1/2, 0)" in out
    assert "paper_class  G^(s,H) with s = 4\n" in out
    assert "H/2        σ = 8, paper_class s = 16" in out


def test_verify_subprocess(heat_verify):
    assert heat_verify.returncode == 0, heat_verify.stderr
    rep = json.loads(heat_verify.stdout)
    validate(rep)
    growth = rep["verification"]["iterate_growth"]
    assert growth["count"] == 3 and growth["all_satisfied"]
    assert "heat_kernel" in rep["verification"]["gevrey_fit"]


def test_json_is_byte_deterministic(heat_verify):
    again = subprocess.run(
        [sys.executable, "-m", "hypogevrey", "verify", HEAT, "--format", "json", *FAST],
        capture_output=True,
        text=True,
        check=False,
    )
    assert again.stdout == heat_verify.stdout


def test_jmax_zero_row_is_u_norm(capsys):
    code, rep, _ = run_json(capsys, "verify", HEAT, "--jmax", "0", "--witness-count", "1", "--orders", "2", "--denom-max", "4")
    assert code == 0
    (w,) = rep["verification"]["iterate_growth"]["witnesses"]
    assert [r["j"] for r in w["rows"]] == [0]
    assert w["rows"][0]["norm"] == w["u_norm"]
