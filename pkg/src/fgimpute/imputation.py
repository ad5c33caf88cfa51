"""Covariate imputation: compatible (rejection/exact) and directly specified methods.

Four methods are provided, differing in which outcome structure they condition
on. The "fg" flavors use the subdistribution time V and cause-1 indicator; the
"cs" flavors use the observed (T, D) with one proportional-hazards model per
cause. The "smc" variants sample from a density proportional to
(outcome likelihood) x (covariate model); the "approx" variants fit a directly
specified regression with outcome summaries as predictors.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import expit

from .cox import breslow_baseline, fit_cox
from .data import SubdistDataset
from .exceptions import ConfigError, DataError, NumericalError
from .glm import draw_glm_params, fit_glm
from .stepfun import StepFunction

METHODS = ("fg_smc", "cs_smc", "fg_approx", "cs_approx")


@dataclass
class ImputationConfig:
    method: str
    iterations: int = 10
    rejection_cap: int = 10000
    covariate_models: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.method not in METHODS:
            raise ConfigError(f"unknown imputation method: {self.method!r}")
        if self.iterations < 1:
            raise ConfigError("iterations must be >= 1")
        if self.rejection_cap < 100:
            raise ConfigError("rejection_cap must be >= 100")
        for name, fam in self.covariate_models.items():
            if fam not in ("logistic", "linear"):
                raise ConfigError(f"unknown covariate model {fam!r} for {name!r}")

    @property
    def flavor(self) -> str:
        return self.method.split("_")[0]

    @property
    def is_smc(self) -> bool:
        return self.method.endswith("smc")


@dataclass
class SubstantiveParams:
    """Coefficients plus cumulative baseline hazard of one hazard model."""

    names: tuple
    beta: np.ndarray
    cumhaz: StepFunction


def _init_missing(covariates, rng):
    """Fill missing entries by resampling observed values of the same column."""
    completed = covariates.copy()
    for col in completed.columns:
        vals = completed[col].to_numpy(dtype=float)
        miss = np.isnan(vals)
        if miss.any():
            obs = vals[~miss]
            if obs.size == 0:
                raise DataError(f"covariate {col!r} has no observed values")
            vals[miss] = rng.choice(obs, size=int(miss.sum()), replace=True)
            completed[col] = vals
    return completed


def _log_outcome_density_fg(eta, event1, lam0_v):
    """log of [lambda0 e^eta]^I(D=1) exp(-Lambda0(V) e^eta), up to terms constant in x."""
    return np.where(event1, eta, 0.0) - lam0_v * np.exp(eta)


def _covariate_model_family(config, name) -> str:
    return config.covariate_models.get(name, "logistic")


def smc_conditional_density(
    x_candidate,
    covariates: dict,
    target: str,
    flavor: str,
    params,
    event1=None,
    v_time=None,
    status=None,
    time=None,
):
    """Unnormalised outcome density of one record as a function of a candidate value.

    flavor "fg": ``params`` is a SubstantiveParams for the subdistribution
    hazard model; requires ``event1`` and ``v_time``. flavor "cs": ``params``
    is a pair of SubstantiveParams (cause 1, cause 2); requires ``status`` and
    ``time``. Factors constant in the candidate value are dropped.
    """
    x = np.atleast_1d(np.asarray(x_candidate, dtype=float))

    def eta_for(p: SubstantiveParams):
        base = sum(
            p.beta[i] * float(covariates[name])
            for i, name in enumerate(p.names)
            if name != target
        )
        j = p.names.index(target)
        return base + p.beta[j] * x

    if flavor == "fg":
        eta = eta_for(params)
        logf = _log_outcome_density_fg(eta, bool(event1), float(params.cumhaz(v_time)))
    elif flavor == "cs":
        p1, p2 = params
        logf = _log_outcome_density_fg(eta_for(p1), status == 1, float(p1.cumhaz(time)))
        logf = logf + _log_outcome_density_fg(eta_for(p2), status == 2, float(p2.cumhaz(time)))
    else:
        raise ConfigError(f"unknown flavor: {flavor!r}")
    out = np.exp(logf - logf.max())
    return out if np.ndim(x_candidate) else float(out[0])


def _outcome_summary_columns(sd: SubdistDataset, flavor: str):
    if flavor == "fg":
        if sd.subdist_cumhaz1 is None:
            raise DataError("fg flavor requires the Lambda1(V) column; compute it first")
        return {
            "_event1": sd.event1.astype(float),
            "_lambda1": sd.subdist_cumhaz1,
        }
    if sd.cs_cumhaz1 is None or sd.cs_cumhaz2 is None:
        raise DataError("cs flavor requires H1(T) and H2(T) columns; compute them first")
    return {
        "_event1": (sd.status == 1).astype(float),
        "_event2": (sd.status == 2).astype(float),
        "_cs_h1": sd.cs_cumhaz1,
        "_cs_h2": sd.cs_cumhaz2,
    }


def _draw_from_covariate_model(family, eta, sigma, rng):
    if family == "logistic":
        return (rng.uniform(size=len(eta)) < expit(eta)).astype(float)
    return eta + sigma * rng.standard_normal(len(eta))


def impute_approx(sd: SubdistDataset, config: ImputationConfig, rng) -> SubdistDataset:
    """Directly specified (regression) imputation, one completed dataset out."""
    flavor = config.flavor
    outcome_cols = _outcome_summary_columns(sd, flavor)
    missing_cols = [c for c in sd.covariates.columns if sd.covariates[c].isna().any()]
    if not missing_cols:
        out = sd.copy()
        return out

    observed_mask = {c: sd.covariates[c].notna().to_numpy() for c in missing_cols}
    completed = _init_missing(sd.covariates, rng) if len(missing_cols) > 1 else sd.covariates.copy()
    n_cycles = 1 if len(missing_cols) == 1 else config.iterations

    for _ in range(n_cycles):
        for col in missing_cols:
            family = _covariate_model_family(config, col)
            others = [c for c in sd.covariates.columns if c != col]
            design_parts = [np.ones(len(sd))]
            design_parts += [completed[c].to_numpy(dtype=float) for c in others]
            design_parts += [v for v in outcome_cols.values()]
            design = np.column_stack(design_parts)
            obs = observed_mask[col]
            y = sd.covariates[col].to_numpy(dtype=float)[obs]
            try:
                fit = fit_glm(y, design[obs], family)
            except NumericalError as err:
                raise NumericalError(f"imputation model for {col!r} failed: {err}") from err
            beta, sigma = draw_glm_params(fit, rng)
            miss = ~obs
            eta = design[miss] @ beta
            vals = completed[col].to_numpy(dtype=float)
            vals[miss] = _draw_from_covariate_model(family, eta, sigma, rng)
            completed[col] = vals

    out = sd.copy()
    out.covariates = completed
    return out


def _fit_and_draw_substantive(sd: SubdistDataset, completed, flavor, rng):
    names = tuple(completed.columns)
    x = completed.to_numpy(dtype=float)
    if flavor == "fg":
        fit = fit_cox(sd.v_time, sd.event1, x, names)
        beta = rng.multivariate_normal(fit.coefficients, fit.covariance)
        base = breslow_baseline(sd.v_time, sd.event1, x, beta)
        return SubstantiveParams(names, beta, base)
    fits = []
    for cause in (1, 2):
        fit = fit_cox(sd.time, sd.status == cause, x, names)
        beta = rng.multivariate_normal(fit.coefficients, fit.covariance)
        base = breslow_baseline(sd.time, sd.status == cause, x, beta)
        fits.append(SubstantiveParams(names, beta, base))
    return tuple(fits)


def _log_outcome_density_rows(params, flavor, sd, design, rows):
    """Row-wise unnormalised log outcome density for the given design values."""
    if flavor == "fg":
        eta = design @ params.beta
        lam = np.asarray(params.cumhaz(sd.v_time[rows]))
        return _log_outcome_density_fg(eta, sd.event1[rows], lam)
    p1, p2 = params
    eta1 = design @ p1.beta
    eta2 = design @ p2.beta
    l1 = np.asarray(p1.cumhaz(sd.time[rows]))
    l2 = np.asarray(p2.cumhaz(sd.time[rows]))
    return _log_outcome_density_fg(eta1, sd.status[rows] == 1, l1) + _log_outcome_density_fg(
        eta2, sd.status[rows] == 2, l2
    )


def _impute_binary_exact(sd, completed, col, params, flavor, cov_eta, rng, miss):
    """Exact two-point conditional draw for a binary covariate."""
    names = list(completed.columns)
    j = names.index(col)
    design = completed.to_numpy(dtype=float)[miss]
    d0 = design.copy()
    d0[:, j] = 0.0
    d1 = design.copy()
    d1[:, j] = 1.0
    rows = np.flatnonzero(miss)
    log0 = _log_outcome_density_rows(params, flavor, sd, d0, rows)
    log1 = _log_outcome_density_rows(params, flavor, sd, d1, rows)
    # posterior log-odds of x = 1: outcome contribution plus covariate-model prior
    logits = (log1 - log0) + cov_eta
    return (rng.uniform(size=len(rows)) < expit(logits)).astype(float)


def _impute_continuous_rejection(sd, completed, col, params, flavor, cov_eta, sigma, rng, miss, cap):
    """Rejection sampling from the proposal f(Xj | X_-j) with a gridded bound."""
    names = list(completed.columns)
    j = names.index(col)
    rows = np.flatnonzero(miss)
    design = completed.to_numpy(dtype=float)[miss]
    out = np.empty(len(rows))
    for r, (row_idx, drow) in enumerate(zip(rows, design)):
        mu = cov_eta[r]
        grid = np.linspace(mu - 6 * sigma, mu + 6 * sigma, 201)
        dd = np.repeat(drow[None, :], len(grid), axis=0)
        dd[:, j] = grid
        log_grid = _log_outcome_density_rows(params, flavor, sd, dd, np.repeat(row_idx, len(grid)))
        log_bound = log_grid.max()
        accepted = False
        for _ in range(cap):
            x = mu + sigma * rng.standard_normal()
            d1 = drow.copy()
            d1[j] = x
            logf = _log_outcome_density_rows(params, flavor, sd, d1[None, :], np.array([row_idx]))[0]
            if np.log(rng.uniform()) < logf - log_bound:
                out[r] = x
                accepted = True
                break
        if not accepted:
            raise NumericalError(
                f"rejection sampling failed for record {sd.ids[row_idx]!r}, covariate {col!r}"
            )
    return out


def impute_smc(sd: SubdistDataset, config: ImputationConfig, rng) -> SubdistDataset:
    """Substantive-model-compatible FCS imputation, one completed dataset out."""
    flavor = config.flavor
    missing_cols = [c for c in sd.covariates.columns if sd.covariates[c].isna().any()]
    if not missing_cols:
        return sd.copy()
    observed_mask = {c: sd.covariates[c].notna().to_numpy() for c in missing_cols}
    completed = _init_missing(sd.covariates, rng)

    for cycle in range(config.iterations):
        try:
            params = _fit_and_draw_substantive(sd, completed, flavor, rng)
        except NumericalError as err:
            raise NumericalError(f"substantive refit failed at cycle {cycle}: {err}") from err
        for col in missing_cols:
            family = _covariate_model_family(config, col)
            others = [c for c in sd.covariates.columns if c != col]
            design = np.column_stack(
                [np.ones(len(sd))] + [completed[c].to_numpy(dtype=float) for c in others]
            )
            y = completed[col].to_numpy(dtype=float)
            try:
                cfit = fit_glm(y, design, family)
            except NumericalError as err:
                raise NumericalError(f"covariate model for {col!r} failed: {err}") from err
            beta, sigma = draw_glm_params(cfit, rng)
            miss = ~observed_mask[col]
            cov_eta = design[miss] @ beta
            vals = completed[col].to_numpy(dtype=float)
            if family == "logistic":
                vals[miss] = _impute_binary_exact(
                    sd, completed, col, params, flavor, cov_eta, rng, miss
                )
            else:
                vals[miss] = _impute_continuous_rejection(
                    sd, completed, col, params, flavor, cov_eta, sigma, rng, miss, config.rejection_cap
                )
            completed[col] = vals

    out = sd.copy()
    out.covariates = completed
    return out


def impute_covariates(sd: SubdistDataset, config: ImputationConfig, rng) -> SubdistDataset:
    """Dispatch on the configured method."""
    if config.is_smc:
        return impute_smc(sd, config, rng)
    return impute_approx(sd, config, rng)
