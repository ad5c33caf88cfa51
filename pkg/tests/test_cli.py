import hashlib
import sys

import numpy as np
import pandas as pd
import pytest

from fgimpute.cli import main
from fgimpute.simulation.dgm import FgDgmParams, apply_censoring, gen_fg_correct, impose_mar


def _write_input_csv(path, n=800, seed=3):
    rng = np.random.default_rng(seed)
    full = gen_fg_correct(n, FgDgmParams(p=0.15), rng)
    full = apply_censoring(full, "random", rate=0.49, rng=rng)
    masked = impose_mar(full, 1.5, 0.4, rng)
    df = pd.DataFrame(
        {
            "id": masked.ids,
            "time": masked.time,
            "D": masked.status,
            "X": masked.covariates["X"],
            "Z": masked.covariates["Z"],
        }
    )
    df.to_csv(path, index=False, na_rep="NA")
    return path


def _run(monkeypatch, *args):
    monkeypatch.setattr(sys, "argv", ["fgimpute", *map(str, args)])
    try:
        main()
    except SystemExit as err:
        return err.code
    return 0


@pytest.fixture(scope="module")
def analysis_outputs(tmp_path_factory):
    root = tmp_path_factory.mktemp("cli")
    csv = _write_input_csv(root / "input.csv")
    before = hashlib.sha256(csv.read_bytes()).hexdigest()
    out = root / "out"
    mp = pytest.MonkeyPatch()
    code = _run(
        mp,
        "impute-analyze",
        "--input", csv,
        "--covariates", "X:binary,Z:continuous",
        "--id-col", "id",
        "--method", "fg-smc",
        "--m", 5,
        "--iterations", 5,
        "--seed", 17,
        "--horizons", "1,3,5",
        "--reference", "X=1,Z=0",
        "--output-dir", out,
    )
    mp.undo()
    after = hashlib.sha256(csv.read_bytes()).hexdigest()
    return code, out, before, after


def test_impute_analyze_succeeds(analysis_outputs):
    code, out, before, after = analysis_outputs
    assert code == 0
    for name in ("pooled_coefficients.csv", "pooled_cuminc.csv", "pooled_model.json",
                 "imputed_datasets.csv", "pooled_cuminc.png"):
        assert (out / name).exists(), name
    assert before == after  # input never mutated


def test_impute_analyze_coefficient_sane(analysis_outputs):
    _, out, _, _ = analysis_outputs
    coef = pd.read_csv(out / "pooled_coefficients.csv")
    row = coef.loc[coef["term"] == "X"].iloc[0]
    assert abs(row["estimate"] - 0.75) < 2 * row["std.error"]
    assert row["std.error"] > 0
    assert 0 < row["p.value"] <= 1


def test_imputed_datasets_complete(analysis_outputs):
    _, out, _, _ = analysis_outputs
    imp = pd.read_csv(out / "imputed_datasets.csv")
    assert sorted(imp["imp"].unique()) == [1, 2, 3, 4, 5]
    assert not imp["X"].isna().any()
    assert set(imp["X"].unique()) <= {0.0, 1.0}


def test_predict_round_trip(analysis_outputs, tmp_path, monkeypatch):
    _, out, _, _ = analysis_outputs
    dest = tmp_path / "pred.csv"
    code = _run(
        monkeypatch,
        "predict",
        "--model", out / "pooled_model.json",
        "--horizons", "1,3,5",
        "--reference", "X=1,Z=0",
        "--output", dest,
    )
    assert code == 0
    pred = pd.read_csv(dest)
    pooled = pd.read_csv(out / "pooled_cuminc.csv")
    np.testing.assert_allclose(
        pred["estimate"].to_numpy(), pooled["estimate"].to_numpy(), atol=1e-10
    )
    np.testing.assert_allclose(pred["ci_low"].to_numpy(), pooled["ci_low"].to_numpy(), atol=1e-10)


def test_bad_covariate_spec_exit_2(tmp_path, monkeypatch):
    csv = _write_input_csv(tmp_path / "d.csv", n=60)
    code = _run(
        monkeypatch,
        "impute-analyze", "--input", csv, "--covariates", "X binary",
        "--output-dir", tmp_path / "o",
    )
    assert code == 2


def test_missing_input_exit_3(tmp_path, monkeypatch):
    code = _run(
        monkeypatch,
        "impute-analyze", "--input", tmp_path / "nope.csv",
        "--covariates", "X:binary,Z:continuous", "--output-dir", tmp_path / "o",
    )
    assert code == 3


def test_duplicate_ids_exit_3(tmp_path, monkeypatch, capsys):
    csv = _write_input_csv(tmp_path / "d.csv", n=60)
    df = pd.read_csv(csv, na_values=["NA"], keep_default_na=False)
    df["id"] = 1
    df.to_csv(csv, index=False, na_rep="NA")
    code = _run(
        monkeypatch,
        "impute-analyze", "--input", csv, "--id-col", "id",
        "--covariates", "X:binary,Z:continuous", "--output-dir", tmp_path / "o",
    )
    assert code == 3
    assert "duplicate" in capsys.readouterr().err


def test_method_full_rejected_on_cli(tmp_path, monkeypatch):
    csv = _write_input_csv(tmp_path / "d.csv", n=60)
    code = _run(
        monkeypatch,
        "impute-analyze", "--input", csv, "--method", "full",
        "--covariates", "X:binary,Z:continuous", "--output-dir", tmp_path / "o",
    )
    assert code == 2


def test_predict_missing_model_exit_3(tmp_path, monkeypatch):
    code = _run(
        monkeypatch,
        "predict", "--model", tmp_path / "missing.json",
        "--horizons", "1", "--reference", "X=1,Z=0",
        "--output", tmp_path / "p.csv",
    )
    assert code == 3


SIM_CONFIG = """
defaults:
  dgm: fg_correct
  p: 0.65
  censoring: random
  n: 150
  n_sim: 4
  m: 2
  iterations: 2
  methods: [cca, fg_approx]
  horizons: [1.0]
  references: [[1.0, 0.0]]
  seed: 99
scenarios:
  - name: tiny
"""


def test_simulate_end_to_end_and_deterministic(tmp_path, monkeypatch):
    cfg = tmp_path / "sim.yaml"
    cfg.write_text(SIM_CONFIG)
    out1 = tmp_path / "run1"
    out2 = tmp_path / "run2"
    assert _run(monkeypatch, "simulate", "--config", cfg, "--output-dir", out1) == 0
    assert _run(monkeypatch, "simulate", "--config", cfg, "--output-dir", out2) == 0

    assert (out1 / "performance.csv").read_bytes() == (out2 / "performance.csv").read_bytes()
    assert (out1 / "replications.csv").read_bytes() == (out2 / "replications.csv").read_bytes()
    figures = list((out1 / "figures").glob("*.png"))
    assert figures

    perf = pd.read_csv(out1 / "performance.csv")
    assert set(perf["method"].unique()) == {"cca", "fg_approx"}
    assert "bias" in set(perf["metric"])


def test_simulate_invalid_key_exit_2(tmp_path, monkeypatch, capsys):
    cfg = tmp_path / "bad.yaml"
    cfg.write_text("scenarios:\n  - name: a\n    bogus: 1\n")
    code = _run(monkeypatch, "simulate", "--config", cfg, "--output-dir", tmp_path / "o")
    assert code == 2
    assert "bogus" in capsys.readouterr().err


def test_simulate_missing_config_exit_2(tmp_path, monkeypatch):
    code = _run(monkeypatch, "simulate", "--config", tmp_path / "none.yaml",
                "--output-dir", tmp_path / "o")
    assert code == 2
