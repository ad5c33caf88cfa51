"""CSV ingestion and model persistence for the command-line entry points."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import pandas as pd

from .cox import CoxFit
from .data import CompetingRisksData
from .exceptions import ConfigError, DataError
from .stepfun import StepFunction

NA_VALUES = ["", "NA"]


@dataclass
class AnalysisSpec:
    """Parsed configuration for one impute-and-analyze run."""

    input_path: Path
    time_column: str
    status_column: str
    covariate_columns: dict  # name -> "binary" | "continuous"
    id_column: str | None = None
    strata_columns: tuple = ()
    method: str = "fg_smc"
    m: int = 10
    iterations: int = 10
    seed: int = 1
    horizons: tuple = ()
    reference_rows: tuple = ()  # tuples of dicts
    censoring_mode: str = "random"
    output_dir: Path = Path(".")

    def __post_init__(self):
        for name, kind in self.covariate_columns.items():
            if kind not in ("binary", "continuous"):
                raise ConfigError(f"covariate {name!r} has unknown type {kind!r}")

    @property
    def covariate_models(self) -> dict:
        return {
            name: ("logistic" if kind == "binary" else "linear")
            for name, kind in self.covariate_columns.items()
        }


def read_competing_risks_csv(spec: AnalysisSpec) -> CompetingRisksData:
    """Read a comma-separated file with a header row; "NA" or empty = missing."""
    try:
        df = pd.read_csv(spec.input_path, na_values=NA_VALUES, keep_default_na=False)
    except FileNotFoundError:
        raise DataError(f"input file not found: {spec.input_path}")
    except pd.errors.ParserError as err:
        raise DataError(f"malformed CSV: {err}")

    needed = [spec.time_column, spec.status_column, *spec.covariate_columns, *spec.strata_columns]
    if spec.id_column:
        needed.append(spec.id_column)
    missing = [c for c in needed if c not in df.columns]
    if missing:
        raise DataError(f"columns not found in input header: {missing}")

    for col in (spec.time_column, spec.status_column):
        bad = df.index[df[col].isna()]
        if len(bad):
            raise DataError(f"missing value in required column {col!r} at line {bad[0] + 2}")
    time = pd.to_numeric(df[spec.time_column], errors="coerce")
    if time.isna().any():
        line = int(time.index[time.isna()][0]) + 2
        raise DataError(f"non-numeric time at line {line}")
    status = pd.to_numeric(df[spec.status_column], errors="coerce")
    if status.isna().any() or not status.isin([0, 1, 2]).all():
        raise DataError(f"status column {spec.status_column!r} must contain only 0, 1, 2")

    cov_cols = list(spec.covariate_columns) + [
        c for c in spec.strata_columns if c not in spec.covariate_columns
    ]
    covariates = df[cov_cols].apply(pd.to_numeric, errors="coerce")
    ids = df[spec.id_column].to_numpy() if spec.id_column else np.arange(1, len(df) + 1)
    return CompetingRisksData(
        ids=ids, time=time.to_numpy(dtype=float), status=status.to_numpy(dtype=int), covariates=covariates
    )


def _stepfun_to_dict(sf: StepFunction) -> dict:
    return {
        "jump_times": sf.jump_times.tolist(),
        "values": sf.values.tolist(),
        "initial_value": sf.initial_value,
    }


def _stepfun_from_dict(d: dict) -> StepFunction:
    return StepFunction(
        jump_times=np.asarray(d["jump_times"]),
        values=np.asarray(d["values"]),
        initial_value=d["initial_value"],
    )


def save_pooled_model(fits: list[CoxFit], n_complete: float, path: Path) -> None:
    """Persist per-imputation fits so predictions can be pooled later."""
    payload = {
        "n_complete": None if np.isinf(n_complete) else n_complete,
        "fits": [
            {
                "names": list(f.names),
                "coefficients": f.coefficients.tolist(),
                "covariance": f.covariance.tolist(),
                "baseline_cumhaz": _stepfun_to_dict(f.baseline_cumhaz),
                "event_times": f.event_times.tolist(),
                "event_counts": f.event_counts.tolist(),
                "s0": f.s0.tolist(),
                "s1": f.s1.tolist(),
                "loglik": f.loglik,
                "converged": f.converged,
                "n_iterations": f.n_iterations,
            }
            for f in fits
        ],
    }
    Path(path).write_text(json.dumps(payload))


def load_pooled_model(path: Path):
    try:
        payload = json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise DataError(f"model file not found: {path}")
    except json.JSONDecodeError as err:
        raise DataError(f"malformed model file: {err}")
    fits = []
    for d in payload["fits"]:
        fits.append(
            CoxFit(
                names=tuple(d["names"]),
                coefficients=np.asarray(d["coefficients"]),
                covariance=np.asarray(d["covariance"]),
                baseline_cumhaz=_stepfun_from_dict(d["baseline_cumhaz"]),
                loglik=d["loglik"],
                converged=d["converged"],
                n_iterations=d["n_iterations"],
                event_times=np.asarray(d["event_times"]),
                event_counts=np.asarray(d["event_counts"]),
                s0=np.asarray(d["s0"]),
                s1=np.asarray(d["s1"], dtype=float).reshape(len(d["event_times"]), len(d["names"])),
            )
        )
    n_complete = payload["n_complete"]
    return fits, (np.inf if n_complete is None else float(n_complete))
