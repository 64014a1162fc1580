import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

import biharmlab as bl
from biharmlab.experiments import ConfigError, config_hash, convergence_study, run, validate_config


def _cli(*args):
    return subprocess.run([sys.executable, "-m", "biharmlab.cli", *args],
                          capture_output=True, text=True)


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------

def test_unknown_kind_rejected():
    with pytest.raises(ConfigError, match="unknown kind"):
        validate_config({"kind": "frobnicate"})
    with pytest.raises(ConfigError, match="non-empty"):
        validate_config({})


def test_misordered_ladder_rejected():
    with pytest.raises(ConfigError, match="strictly increasing"):
        validate_config({"kind": "convergence-study", "problem": "solve-1d",
                         "levels": [513, 257, 1025]})
    with pytest.raises(ConfigError, match="at least 3"):
        validate_config({"kind": "convergence-study", "problem": "solve-1d",
                         "levels": [257, 513]})


def test_solve_1d_requires_steep_slope():
    with pytest.raises(ConfigError, match="lam"):
        validate_config({"kind": "solve-1d", "lam": -2.0, "n": 257})


def test_blowup_scale_window():
    with pytest.raises(ConfigError, match="s must lie"):
        validate_config({"kind": "blowup", "source": "halfspace", "s": 0.7, "K": 3})


# ---------------------------------------------------------------------------
# direct runs
# ---------------------------------------------------------------------------

def test_solve_1d_summary(tmp_path):
    summary = run({"kind": "solve-1d", "lam": -6.0, "n": 1025}, tmp_path)
    assert summary["gamma_hat"] == pytest.approx(0.5, abs=2 * summary["h"])
    assert summary["energy"] == pytest.approx(96.0, rel=1e-2)
    assert summary["kkt"]["passed"]
    assert summary["config_hash"] == config_hash({"kind": "solve-1d", "lam": -6.0, "n": 1025})
    assert (tmp_path / "summary.json").exists()
    assert (tmp_path / "solution.json").exists()
    back = bl.load_field(tmp_path / "solution.json")
    assert back.grid.shape == (1025,)


def test_oracle_verify_one_dim(tmp_path):
    summary = run({"kind": "oracle-verify", "oracle": "one-dim", "lam": -4.0, "n": 513}, tmp_path)
    assert summary["gamma"] == pytest.approx(0.75)
    assert summary["measure_mass"] == pytest.approx(summary["mass_formula"], rel=1e-6)


def test_measure_identity_experiment(tmp_path):
    summary = run({"kind": "measure-identity", "n": 257}, tmp_path)
    assert summary["rel_error"] < 0.01


def test_convergence_study_1d(tmp_path):
    summary = convergence_study(
        {"kind": "convergence-study", "problem": "solve-1d", "lam": -6.0,
         "levels": [129, 257, 513]}, tmp_path, seed=0)
    rows = summary["rows"]
    assert rows[-1]["energy_error"] < rows[0]["energy_error"]
    assert all(r["observed_order"] >= 0.9 for r in rows[1:])
    table = (tmp_path / "study.csv").read_text().splitlines()
    assert table[0].startswith("n,h,")
    assert len(table) == 4


def test_exponent_experiment(tmp_path):
    summary = run({"kind": "exponent", "target": "halfspace-laplacian",
                   "r_min": 0.01, "r_max": 0.2}, tmp_path)
    assert summary["alpha_hat"] == pytest.approx(1.0, abs=0.02)
    assert (tmp_path / "ladder.csv").exists()


def test_blowup_experiment_writes_trace(tmp_path):
    summary = run({"kind": "blowup", "source": "one-dim-embedded", "s": 0.4, "K": 3}, tmp_path)
    assert summary["trace"]["at_floor"]
    lines = (tmp_path / "trace.csv").read_text().splitlines()
    assert len(lines) == 5  # header + K+1 rows


def test_nta_experiment_halfplane(tmp_path):
    summary = run({"kind": "nta", "mask": "halfplane", "M": 2.0, "n": 129}, tmp_path)
    assert summary["sampled_verdict"] is True
    assert all(c["interior"]["success"] for c in summary["cases"])


# ---------------------------------------------------------------------------
# CLI behavior
# ---------------------------------------------------------------------------

def test_cli_roundtrip_and_exit_codes(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"kind": "solve-1d", "lam": -6.0, "n": 257}))
    r = _cli("solve", "--config", str(cfg), "--out", str(tmp_path / "out"))
    assert r.returncode == 0, r.stderr
    summary = json.loads((tmp_path / "out" / "summary.json").read_text())
    assert summary["kind"] == "solve-1d"
    assert "version" in summary and "config_hash" in summary


def test_cli_validation_exit_code(tmp_path):
    cfg = tmp_path / "empty.json"
    cfg.write_text("{}")
    r = _cli("solve", "--config", str(cfg), "--out", str(tmp_path / "o1"))
    assert r.returncode == 2
    err = json.loads((tmp_path / "o1" / "error.json").read_text())
    assert err["error"] == "validation"
    # missing file
    r2 = _cli("solve", "--config", str(tmp_path / "nope.json"), "--out", str(tmp_path / "o2"))
    assert r2.returncode == 2
    # kind/subcommand mismatch
    cfg3 = tmp_path / "mismatch.json"
    cfg3.write_text(json.dumps({"kind": "blowup", "source": "halfspace", "s": 0.4, "K": 2}))
    r3 = _cli("solve", "--config", str(cfg3), "--out", str(tmp_path / "o3"))
    assert r3.returncode == 2


def test_cli_nonconvergence_exit_code(tmp_path):
    cfg = tmp_path / "hard.json"
    cfg.write_text(json.dumps({
        "kind": "solve-1d", "lam": -6.0, "n": 257,
        "solver": {"max_iterations": 2, "fallback_iterations": 200},
    }))
    r = _cli("solve", "--config", str(cfg), "--out", str(tmp_path / "out"))
    assert r.returncode == 3
    assert (tmp_path / "out" / "best_iterate.json").exists()
    assert (tmp_path / "out" / "failure.json").exists()


def test_cli_deterministic_outputs(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"kind": "blowup", "source": "perturbed", "s": 0.4,
                               "K": 2, "n": 129, "n_work": 101}))
    r1 = _cli("blowup", "--config", str(cfg), "--out", str(tmp_path / "a"), "--seed", "11")
    r2 = _cli("blowup", "--config", str(cfg), "--out", str(tmp_path / "b"), "--seed", "11")
    assert r1.returncode == 0 and r2.returncode == 0
    assert (tmp_path / "a" / "summary.json").read_bytes() == (tmp_path / "b" / "summary.json").read_bytes()
    assert (tmp_path / "a" / "trace.csv").read_bytes() == (tmp_path / "b" / "trace.csv").read_bytes()
    # a different seed changes the perturbation
    r3 = _cli("blowup", "--config", str(cfg), "--out", str(tmp_path / "c"), "--seed", "12")
    assert r3.returncode == 0
    assert (tmp_path / "a" / "trace.csv").read_bytes() != (tmp_path / "c" / "trace.csv").read_bytes()
