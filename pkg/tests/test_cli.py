"""Command-line interface: JSON schemas, exit codes, cache, config."""

import json

import pytest

from qschwarz.cli import (EXIT_CONFIG, EXIT_NUMERICAL, EXIT_OK,
                          EXIT_VERIFICATION, main)
from qschwarz.series import load_series


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    doc = json.loads(captured.out) if captured.out.strip() else None
    return code, doc


@pytest.fixture(autouse=True)
def isolated_cache(tmp_path, monkeypatch):
    monkeypatch.setenv("QSCHWARZ_CACHE_DIR", str(tmp_path / "cache"))
    return tmp_path


# ---------------------------------------------------------------------------
# solve


def test_solve_json_schema(capsys):
    code, doc = run(capsys, "solve", "--n", "1", "--no-cache")
    assert code == EXIT_OK
    assert doc["n"] == 1
    assert len(doc["xs"]) == 1
    assert doc["residual_norm"] < 1e-12
    assert doc["iterations"] >= 1
    poly = doc["poly"]
    assert poly["rational_coeffs"] == ["1", "-4/7"]
    assert poly["float_coeffs"][0] == 1.0
    assert poly["certification"]["ok"] is True
    assert "reported_diff" not in doc  # no archived polynomial for n=1


def test_solve_reports_structured_diff(capsys):
    code, doc = run(capsys, "solve", "--n", "2", "--no-cache")
    assert code == EXIT_OK
    diff = doc["reported_diff"]
    assert diff["match"] is False
    rows = {r["degree"]: r["match"] for r in diff["coefficients"]}
    assert rows == {2: True, 1: True, 0: False}


def test_solve_cache_round_trip(capsys):
    code, doc = run(capsys, "solve", "--n", "2")
    assert code == EXIT_OK and doc["cache_hit"] is False
    code, doc = run(capsys, "solve", "--n", "2")
    assert code == EXIT_OK and doc["cache_hit"] is True
    # different parameters miss the cache
    code, doc = run(capsys, "solve", "--n", "2", "--c", "11")
    assert code == EXIT_OK and doc["cache_hit"] is False


def test_solve_corrupt_cache_recomputes(capsys, tmp_path, monkeypatch):
    cache = tmp_path / "cache2"
    monkeypatch.setenv("QSCHWARZ_CACHE_DIR", str(cache))
    code, doc = run(capsys, "solve", "--n", "1")
    assert doc["cache_hit"] is False
    victim = next(cache.glob("*.json"))
    payload = json.loads(victim.read_text())
    payload["xs"] = ["0.25"]
    victim.write_text(json.dumps(payload))
    code, doc = run(capsys, "solve", "--n", "1")
    assert code == EXIT_OK
    assert doc["cache_hit"] is False  # stale entry failed re-verification
    assert abs(doc["xs_float"][0] - 4 / 7) < 1e-12


def test_solve_unreachable_tolerance_exits_3(capsys):
    code, doc = run(capsys, "solve", "--n", "2", "--tol", "1e-30", "--no-cache")
    assert code == EXIT_NUMERICAL
    assert doc is None


# ---------------------------------------------------------------------------
# expand


def test_expand_dump_format_roundtrips(capsys):
    code, doc = run(capsys, "expand", "--form", "eta4", "--order", "4")
    assert code == EXIT_OK
    assert doc["mode"] == "exact"
    assert doc["lead"] == 4
    series = load_series(doc)
    assert series.coefficient(4) == 1
    assert series.q_coefficient(0) == 0  # eta^4 starts at q^(1/6)


def test_expand_weight2_form_with_xs(capsys):
    code, doc = run(capsys, "expand", "--form", "f", "--n", "1",
                    "--xs", "4/7", "--order", "2")
    assert code == EXIT_OK
    assert doc["lead"] == 52
    terms = dict((e, v) for e, v in doc["terms"])
    assert terms[52] == "2985984"


def test_expand_eta_quotient(capsys):
    code, doc = run(capsys, "expand", "--eta-quotient", "eta(2)^2*eta(1/2)^2",
                    "--order", "4")
    assert code == EXIT_OK
    assert doc["grid"] == 24
    assert doc["lead"] == 5


def test_expand_requires_xs_for_pole_forms(capsys):
    code, doc = run(capsys, "expand", "--form", "f", "--n", "1")
    assert code == EXIT_CONFIG
    assert doc is None


# ---------------------------------------------------------------------------
# verify


def test_verify_exact_pass_and_exit_zero(capsys):
    code, doc = run(capsys, "verify", "schwarzian", "--n", "1",
                    "--xs", "4/7", "--mode", "exact", "--order", "8")
    assert code == EXIT_OK
    assert doc["pass"] is True
    assert doc["max_abs_deviation"] == "0"
    assert doc["xs"] == ["4/7"]


def test_verify_failure_exits_4(capsys):
    code, doc = run(capsys, "verify", "schwarzian", "--n", "1",
                    "--xs", "1/2", "--mode", "exact", "--order", "4")
    assert code == EXIT_VERIFICATION
    assert doc["pass"] is False


def test_verify_float_auto_solve(capsys):
    code, doc = run(capsys, "verify", "ode", "--n", "2", "--auto-solve",
                    "--order", "10")
    assert code == EXIT_OK
    assert doc["pass"] is True
    assert float(doc["max_abs_deviation"]) < 1e-8


def test_verify_without_xs_or_autosolve_is_config_error(capsys):
    code, doc = run(capsys, "verify", "schwarzian", "--n", "2", "--order", "5")
    assert code == EXIT_CONFIG


def test_verify_exact_rejects_irrational_auto_solve(capsys):
    code, doc = run(capsys, "verify", "schwarzian", "--n", "2", "--auto-solve",
                    "--mode", "exact", "--order", "5")
    assert code == EXIT_CONFIG  # n=2 does not rationalize


# ---------------------------------------------------------------------------
# residue / equivariance


def test_residue_zero_expectation(capsys):
    code, doc = run(capsys, "residue", "--n", "1", "--auto-solve")
    assert code == EXIT_OK
    assert doc["pass"] is True
    pole = doc["poles"][0]
    assert pole["abs_residue"] < 1e-6
    assert pole["pole_order"] == 2
    assert pole["j_inversion_error"] < 1e-10


def test_residue_negative_control(capsys):
    code, doc = run(capsys, "residue", "--n", "1", "--xs", "1/2",
                    "--expect", "nonzero", "--tol", "1e-3")
    assert code == EXIT_OK
    assert doc["poles"][0]["abs_residue"] > 1e-3
    code, doc = run(capsys, "residue", "--n", "1", "--xs", "1/2")
    assert code == EXIT_VERIFICATION


def test_equivariance_default_samples(capsys):
    code, doc = run(capsys, "equivariance", "--n", "0", "--gamma", "T")
    assert code == EXIT_OK
    assert doc["pass"] is True
    assert doc["gamma"] == [1, 1, 0, 1]


def test_equivariance_matrix_gamma_and_comma_taus(capsys):
    code, doc = run(capsys, "equivariance", "--n", "1", "--auto-solve",
                    "--gamma", "0,-1,1,0",
                    "--tau", "0.3+1.4j,-0.2+1.6j,0.1+1.9j")
    assert code == EXIT_OK
    assert doc["pass"] is True


def test_bad_gamma_is_config_error(capsys):
    code, doc = run(capsys, "equivariance", "--n", "0", "--gamma", "XYZ")
    assert code == EXIT_CONFIG


# ---------------------------------------------------------------------------
# config file and output file


def test_config_file_supplies_defaults(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"order": 6, "mode": "exact"}))
    code, doc = run(capsys, "verify", "schwarzian", "--n", "0",
                    "--config", str(cfg))
    assert code == EXIT_OK
    assert doc["checked_count"] == 7  # orders 0..6


def test_config_flag_override_wins(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"order": 6}))
    code, doc = run(capsys, "verify", "schwarzian", "--n", "0",
                    "--config", str(cfg), "--order", "3")
    assert code == EXIT_OK
    assert doc["checked_count"] == 4


def test_bad_config_exits_2(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text("[1, 2, 3]")
    code, doc = run(capsys, "verify", "schwarzian", "--n", "0",
                    "--config", str(cfg))
    assert code == EXIT_CONFIG
    code, doc = run(capsys, "verify", "schwarzian", "--n", "0",
                    "--config", str(tmp_path / "missing.json"))
    assert code == EXIT_CONFIG


def test_out_writes_same_document(capsys, tmp_path):
    out = tmp_path / "doc.json"
    code, doc = run(capsys, "solve", "--n", "1", "--no-cache",
                    "--out", str(out))
    assert code == EXIT_OK
    assert json.loads(out.read_text()) == doc


def test_exact_mode_output_is_deterministic(capsys):
    _, doc1 = run(capsys, "expand", "--form", "j", "--order", "6")
    _, doc2 = run(capsys, "expand", "--form", "j", "--order", "6")
    assert doc1 == doc2
