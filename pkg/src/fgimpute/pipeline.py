"""End-to-end analysis: hazards columns, censoring imputation, covariate
imputation, per-dataset model fits, and Rubin pooling."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import pandas as pd
from scipy import stats

from .censoring import (
    fit_censoring_km,
    impute_censoring_times,
    make_censoring_complete,
    marginal_subdist_cumhaz,
)
from .cox import CoxFit, cuminc_se, fit_cox, predict_cuminc
from .data import CompetingRisksData, SubdistDataset
from .exceptions import ConfigError
from .imputation import ImputationConfig, impute_covariates
from .nonparametric import marginal_cs_cumhaz
from .pooling import pool_cuminc, rubin_pool

ANALYSIS_METHODS = ("cca", "fg_smc", "cs_smc", "fg_approx", "cs_approx")
CENSORING_MODES = ("random", "administrative", "none")


@dataclass
class AnalysisResult:
    coefficients: pd.DataFrame
    cuminc: pd.DataFrame
    fits: list
    n_imputations: int
    completed_datasets: list = None
    n_complete_df: float = np.inf


def _prepare_censoring_complete(data, mode, method, m, seed, strata):
    """List of censoring-complete datasets feeding the covariate-imputation step."""
    if mode == "random":
        model = fit_censoring_km(data, strata)
        return impute_censoring_times(data, model, m, seed)
    base = make_censoring_complete(data, "administrative" if mode == "administrative" else "no_censoring")
    if method == "cca":
        return [base]
    return [base.copy() for _ in range(m)]


def _attach_hazard_columns(sd: SubdistDataset, h1, h2) -> None:
    sd.cs_cumhaz1 = h1
    sd.cs_cumhaz2 = h2
    sd.subdist_cumhaz1, _ = marginal_subdist_cumhaz(sd)


def _fit_subdist_model(sd: SubdistDataset, formula) -> CoxFit:
    x = sd.covariates[list(formula)].to_numpy(dtype=float)
    return fit_cox(sd.v_time, sd.event1, x, tuple(formula))


def _drop_incomplete(sd: SubdistDataset, formula) -> SubdistDataset:
    keep = sd.covariates[list(formula)].notna().all(axis=1).to_numpy()
    return SubdistDataset(
        ids=sd.ids[keep],
        v_time=sd.v_time[keep],
        event1=sd.event1[keep],
        status=sd.status[keep],
        time=sd.time[keep],
        covariates=sd.covariates.loc[keep].reset_index(drop=True),
        v_imputed=sd.v_imputed[keep],
    )


def run_pipeline(
    data: CompetingRisksData,
    method: str,
    formula=None,
    m: int = 10,
    iterations: int = 10,
    seed: int = 0,
    horizons=(),
    references=(),
    strata=(),
    censoring_mode: str = "random",
    covariate_models=None,
    confidence: float = 0.95,
) -> AnalysisResult:
    """Run the full recipe for one method and pool the results.

    ``references`` is a sequence of covariate dicts at which pooled
    cumulative incidences are computed over ``horizons``.
    """
    if method not in ANALYSIS_METHODS:
        raise ConfigError(f"unknown method: {method!r}")
    if censoring_mode not in CENSORING_MODES:
        raise ConfigError(f"unknown censoring mode: {censoring_mode!r}")
    formula = list(formula) if formula is not None else list(data.covariates.columns)

    h1 = marginal_cs_cumhaz(data, 1)
    h2 = marginal_cs_cumhaz(data, 2)
    datasets = _prepare_censoring_complete(data, censoring_mode, method, m, seed, strata)

    fits = []
    completed_sets = []
    for k, sd in enumerate(datasets):
        if method == "cca":
            completed = _drop_incomplete(sd, formula)
        else:
            _attach_hazard_columns(sd, h1, h2)
            config = ImputationConfig(
                method=method,
                iterations=iterations,
                covariate_models=covariate_models or {},
            )
            rng = np.random.default_rng(np.random.SeedSequence(entropy=[seed, 1000 + k]))
            completed = impute_covariates(sd, config, rng)
        fits.append(_fit_subdist_model(completed, formula))
        completed_sets.append(completed)

    n_complete_df = min(len(c) for c in completed_sets) - len(formula)
    coef_table = pool_coefficients(fits, formula, confidence, n_complete_df)
    cuminc_table = pool_predictions(fits, horizons, references, confidence, n_complete_df)
    return AnalysisResult(
        coefficients=coef_table,
        cuminc=cuminc_table,
        fits=fits,
        n_imputations=len(fits),
        completed_datasets=completed_sets,
        n_complete_df=n_complete_df,
    )


def pool_coefficients(fits, formula, confidence=0.95, n_complete=np.inf) -> pd.DataFrame:
    rows = []
    for j, term in enumerate(formula):
        est = np.array([f.coefficients[j] for f in fits])
        var = np.array([f.covariance[j, j] for f in fits])
        res = rubin_pool(est, var, confidence=confidence, n_complete=n_complete)
        stat = res.estimate / res.std_error if res.std_error > 0 else np.nan
        if np.isfinite(res.df):
            pval = 2 * stats.t.sf(abs(stat), res.df)
        else:
            pval = 2 * stats.norm.sf(abs(stat))
        rows.append(
            {
                "term": term,
                "estimate": res.estimate,
                "std.error": res.std_error,
                "statistic": stat,
                "df": res.df,
                "p.value": pval,
                "ci_low": res.ci_low,
                "ci_high": res.ci_high,
            }
        )
    return pd.DataFrame(rows)


def pool_predictions(fits, horizons, references, confidence=0.95, n_complete=np.inf) -> pd.DataFrame:
    horizons = np.asarray(list(horizons), dtype=float)
    frames = []
    for ref in references:
        label = ",".join(f"{k}={v:g}" for k, v in ref.items())
        est = np.array([predict_cuminc(f, ref, horizons) for f in fits])
        se = np.array([cuminc_se(f, ref, horizons) for f in fits])
        pooled, lo, hi, _ = pool_cuminc(horizons, est, se, confidence=confidence, n_complete=n_complete)
        frames.append(
            pd.DataFrame(
                {
                    "reference": label,
                    "time": horizons,
                    "estimate": pooled,
                    "ci_low": lo,
                    "ci_high": hi,
                }
            )
        )
    if not frames:
        return pd.DataFrame(columns=["reference", "time", "estimate", "ci_low", "ci_high"])
    return pd.concat(frames, ignore_index=True)
