import io
import json
import subprocess
import sys
from pathlib import Path

import pytest

from unigap.cli import main, parse_fraction_arg, run

DATA = Path(__file__).parent / "data"


def run_doc(argv):
    result = run(argv)
    return result.to_doc()


def test_golden_certificate_n4():
    doc = run_doc(["gap", "certify", "--n", "4", "--weight-cap", "12", "--d-cap", "12", "--threads", "1"])
    golden = json.loads((DATA / "gap_certify_n4.json").read_text())
    assert doc == golden


def test_certify_headline_fields():
    doc = run_doc(["gap", "certify", "--n", "4", "--threads", "1"])
    out = doc["output"]
    assert out["delta"] == "1/2"
    assert out["gamma_analytic"] == "3/10"
    assert out["verdict"] is True
    assert doc["exit_code"] == 0


def test_schur_dim():
    doc = run_doc(["schur", "dim", "--lambda", "2,1", "--vars", "3"])
    assert doc["output"]["count"] == "8"
    assert doc["exit_code"] == 0


def test_schur_skew():
    doc = run_doc(["schur", "skew", "--outer", "2,1", "--inner", "1", "--vars", "3"])
    assert doc["output"]["count"] == "9"


def test_spectrum_eval():
    doc = run_doc(["spectrum", "eval", "--spec", "mu(2,4)", "--sig", "lambda=1;d=0"])
    assert doc["output"]["value"] == "1/2"


def test_spectrum_eval_product_group():
    doc = run_doc(
        [
            "spectrum",
            "eval",
            "--spec",
            "twist(prod(riesz(1/6,3), mu(4,8)))",
            "--sig",
            "lambda=0;d=0|lambda=1;d=0",
        ]
    )
    assert doc["output"]["value"] == "1/2"


def test_gap_table_streams_rows():
    buffer = io.StringIO()
    result = run(["gap", "table", "--n-from", "4", "--n-to", "10", "--threads", "1"], stream=buffer)
    lines = [line for line in buffer.getvalue().splitlines() if line]
    assert len(lines) == 7
    rows = [json.loads(line) for line in lines]
    for row in rows:
        assert row["verdict"] is True
        assert row["delta"] == "1/2"
    assert rows[0]["n"] == 4 and rows[-1]["n"] == 10
    assert rows[0]["even_closed_form"] == "3/10"
    assert rows[1]["even_closed_form"] is None
    assert result.exit_code == 0
    assert result.output == {"rows_emitted": 7, "all_verdicts_true": True}


def test_peak_plan_command():
    doc = run_doc(["peak", "plan", "--dims", "2,5", "--epsilon", "1/100"])
    out = doc["output"]
    assert out["epsilon"] == "59049/9765625"
    assert out["weight"] == "4096/1"
    assert out["steps"][-1]["step"] == "twist"
    assert doc["exit_code"] == 0


def test_peak_plan_verify_flag():
    doc = run_doc(
        [
            "peak", "plan", "--dims", "2,4", "--epsilon", "1/10",
            "--verify", "--verify-weight-cap", "3", "--verify-d-cap", "3",
        ]
    )
    assert doc["output"]["verification"]["ok"] is True
    assert doc["exit_code"] == 0


def test_mc_moments_doc():
    doc = run_doc(["mc", "moments", "--d", "2", "--p", "4", "--samples", "5000", "--seed", "42"])
    out = doc["output"]
    assert out["seed"] == 42
    assert out["samples"] == 5000
    assert out["norm_convention"] == pytest.approx(out["estimate"] ** 0.25)
    again = run_doc(["mc", "moments", "--d", "2", "--p", "4", "--samples", "5000", "--seed", "42"])
    assert again == doc


def test_mc_psi2_doc():
    doc = run_doc(["mc", "psi2", "--d", "2", "--samples", "20000", "--seed", "7"])
    assert 0 < doc["output"]["psi2_proxy"] < 0.8


def test_mc_khintchine_doc():
    doc = run_doc(
        ["mc", "khintchine", "--p", "4", "--dims", "3,3", "--trials", "2", "--samples", "2000", "--seed", "1"]
    )
    out = doc["output"]
    assert out["dims"] == [3, 3]
    assert out["moment_ratio_convention"] == out["estimate"]


def test_usage_error_unknown_flag():
    result = run(["gap", "certify", "--n", "4", "--bogus"])
    assert result.exit_code == 2
    assert result.error


def test_usage_error_bad_rational():
    result = run(["peak", "plan", "--dims", "2", "--epsilon", "nope"])
    assert result.exit_code == 2


def test_refusal_maps_to_usage_error():
    result = run(["gap", "certify", "--n", "3"])
    assert result.exit_code == 2
    assert "n > 3" in result.error


def test_mc_seed_mandatory_in_ci_mode(monkeypatch):
    monkeypatch.setenv("UNIGAP_CI", "1")
    result = run(["mc", "moments", "--d", "2", "--p", "2", "--samples", "2000"])
    assert result.exit_code == 2
    assert "--seed" in result.error
    result = run(["mc", "moments", "--d", "2", "--p", "2", "--samples", "2000", "--seed", "5"])
    assert result.exit_code == 0


def test_mc_seed_defaults_outside_ci(monkeypatch):
    monkeypatch.delenv("UNIGAP_CI", raising=False)
    result = run(["mc", "moments", "--d", "2", "--p", "2", "--samples", "2000"])
    assert result.exit_code == 0
    assert result.output["seed"] == 0


def test_parse_fraction_arg():
    from fractions import Fraction

    assert parse_fraction_arg("1/100") == Fraction(1, 100)
    assert parse_fraction_arg("3") == Fraction(3)
    with pytest.raises(Exception):
        parse_fraction_arg("1/0")


def test_main_prints_json(capsys):
    code = main(["schur", "dim", "--lambda", "1", "--vars", "5"])
    captured = capsys.readouterr()
    assert code == 0
    doc = json.loads(captured.out)
    assert doc["output"]["count"] == "5"


def test_main_usage_error_stderr(capsys):
    code = main(["schur", "dim", "--lambda", "1,x", "--vars", "5"])
    captured = capsys.readouterr()
    assert code == 2
    assert captured.out == ""
    assert "error" in captured.err


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "unigap", "schur", "dim", "--lambda", "2,1", "--vars", "3"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["output"]["count"] == "8"
