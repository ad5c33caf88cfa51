"""Cox partial-likelihood fitting (Breslow ties) and cumulative incidence prediction.

On censoring-complete data, a proportional subdistribution-hazards model is
fitted by running this standard Cox machinery with the subdistribution time V
and the cause-1 indicator as outcome variables.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import DataError, SeparationError, SingularInformationError
from .stepfun import StepFunction

MAX_ITER = 50
SCORE_TOL = 1e-9
LOGLIK_RTOL = 1e-12
SEPARATION_BOUND = 15.0


@dataclass
class CoxFit:
    """Result of a partial-likelihood fit.

    Carries the Breslow cumulative baseline hazard plus the risk-set sums at
    event times, which are needed for delta-method incidence standard errors.
    """

    names: tuple
    coefficients: np.ndarray
    covariance: np.ndarray
    baseline_cumhaz: StepFunction
    loglik: float
    converged: bool
    n_iterations: int
    event_times: np.ndarray
    event_counts: np.ndarray
    s0: np.ndarray
    s1: np.ndarray

    def linear_predictor(self, covariates) -> float:
        z = _covariate_vector(self.names, covariates)
        return float(z @ self.coefficients)


def _covariate_vector(names, covariates) -> np.ndarray:
    if isinstance(covariates, dict):
        unknown = set(covariates) - set(names)
        if unknown:
            raise DataError(f"unknown covariate name(s): {sorted(unknown)}")
        missing = set(names) - set(covariates)
        if missing:
            raise DataError(f"missing covariate value(s): {sorted(missing)}")
        return np.array([float(covariates[k]) for k in names])
    z = np.asarray(covariates, dtype=float)
    if z.shape != (len(names),):
        raise DataError("covariate vector length does not match fit")
    return z


def _sorted_arrays(times, events, x):
    times = np.asarray(times, dtype=float)
    events = np.asarray(events, dtype=bool)
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    n = len(times)
    if len(events) != n or len(x) != n:
        raise DataError("length mismatch between outcome and design")
    if not events.any():
        raise DataError("no events in data")
    order = np.argsort(times, kind="stable")
    return times[order], events[order], x[order]


def _risk_sums(t, e, x, beta):
    """Breslow loglik, score, information and risk-set sums at unique event times."""
    n, p = x.shape
    eta = x @ beta
    eta = np.clip(eta, -500, 500)
    w = np.exp(eta)
    # reverse cumulative sums: entry i holds the sum over the risk set {t_k >= t_i}
    rs0 = np.cumsum(w[::-1])[::-1]
    rs1 = np.cumsum((w[:, None] * x)[::-1], axis=0)[::-1]
    outer = np.einsum("i,ij,ik->ijk", w, x, x)
    rs2 = np.cumsum(outer[::-1], axis=0)[::-1]

    uniq, start = np.unique(t, return_index=True)
    event_per_rec = e.astype(int)
    d = np.add.reduceat(event_per_rec, start)
    keep = d > 0
    ev_times = uniq[keep]
    starts = start[keep]
    d = d[keep]

    s0 = rs0[starts]
    s1 = rs1[starts]
    s2 = rs2[starts]

    sum_eta_events = float(eta[e].sum())
    sum_x_events = x[e].sum(axis=0)
    # per-unique-time event sums of x (only needed for score via totals above)
    loglik = sum_eta_events - float(d @ np.log(s0))
    score = sum_x_events - (d[:, None] * s1 / s0[:, None]).sum(axis=0)
    zbar = s1 / s0[:, None]
    info = np.einsum("j,jkl->kl", d, s2 / s0[:, None, None]) - np.einsum(
        "j,jk,jl->kl", d, zbar, zbar
    )
    return loglik, score, info, ev_times, d, s0, s1


def fit_cox(times, events, x=None, names=()) -> CoxFit:
    """Maximise the Cox partial likelihood by Newton-Raphson from beta = 0.

    ``x`` is an (n, p) design matrix; with p = 0 the fit reduces to the
    Nelson-Aalen estimator for the baseline.
    """
    names = tuple(names)
    if x is None:
        x = np.empty((len(np.asarray(times)), 0))
    t, e, xs = _sorted_arrays(times, events, x)
    p = xs.shape[1]
    if p != len(names):
        raise DataError("names length does not match design width")

    beta = np.zeros(p)
    loglik, score, info, ev_times, d, s0, s1 = _risk_sums(t, e, xs, beta)
    converged = p == 0
    n_iter = 0
    for n_iter in range(1, MAX_ITER + 1):
        if p == 0:
            break
        if np.max(np.abs(score)) < SCORE_TOL:
            converged = True
            break
        try:
            step = np.linalg.solve(info, score)
        except np.linalg.LinAlgError:
            raise SingularInformationError("singular information")
        if not np.all(np.isfinite(step)):
            raise SingularInformationError("singular information")
        # step-halving on partial log-likelihood decrease
        factor = 1.0
        for _ in range(30):
            cand = beta + factor * step
            new = _risk_sums(t, e, xs, cand)
            if new[0] >= loglik - 1e-14:
                break
            factor /= 2.0
        beta = beta + factor * step
        prev_loglik = loglik
        loglik, score, info, ev_times, d, s0, s1 = new
        if np.max(np.abs(beta)) > SEPARATION_BOUND:
            raise SeparationError("separation detected")
        if abs(loglik - prev_loglik) < LOGLIK_RTOL * (abs(prev_loglik) + 1.0):
            converged = np.max(np.abs(score)) < 1e-6
            break

    if p > 0:
        try:
            cov = np.linalg.inv(info)
        except np.linalg.LinAlgError:
            raise SingularInformationError("singular information")
    else:
        cov = np.zeros((0, 0))

    baseline = StepFunction(jump_times=ev_times, values=np.cumsum(d / s0), initial_value=0.0)
    return CoxFit(
        names=names,
        coefficients=beta,
        covariance=cov,
        baseline_cumhaz=baseline,
        loglik=loglik,
        converged=bool(converged),
        n_iterations=n_iter,
        event_times=ev_times,
        event_counts=d,
        s0=s0,
        s1=s1,
    )


def breslow_baseline(times, events, x, beta) -> StepFunction:
    """Breslow cumulative baseline hazard at a given (possibly drawn) beta."""
    beta = np.asarray(beta, dtype=float)
    if beta.size == 0:
        x = np.empty((len(np.asarray(times)), 0))
    t, e, xs = _sorted_arrays(times, events, x)
    _, _, _, ev_times, d, s0, _ = _risk_sums(t, e, xs, beta)
    return StepFunction(jump_times=ev_times, values=np.cumsum(d / s0), initial_value=0.0)


def predict_cuminc(fit: CoxFit, covariates, times) -> np.ndarray:
    """Cumulative incidence 1 - exp{-exp(beta'z) * Lambda0(t)}."""
    lp = fit.linear_predictor(covariates)
    lam0 = np.asarray(fit.baseline_cumhaz(np.asarray(times, dtype=float)))
    return 1.0 - np.exp(-np.exp(lp) * lam0)


def cuminc_se(fit: CoxFit, covariates, times) -> np.ndarray:
    """Delta-method SE of log(-log(1 - F1(t|z))) = log Lambda0(t) + beta'z.

    Combines the Breslow baseline-hazard variance with the coefficient
    covariance through the profile expansion; higher-order cross-terms are
    ignored.
    """
    z = _covariate_vector(fit.names, covariates)
    times = np.atleast_1d(np.asarray(times, dtype=float))
    lam0 = np.asarray(fit.baseline_cumhaz(times))
    if np.any(lam0 <= 0):
        raise DataError("no events before t")

    d, s0, s1 = fit.event_counts, fit.s0, fit.s1
    base_var_terms = np.cumsum(d / s0**2)
    if len(fit.names):
        q_terms = np.cumsum((d / s0)[:, None] * (s1 / s0[:, None] - z[None, :]), axis=0)
    idx = np.searchsorted(fit.event_times, times, side="right") - 1

    lp = float(z @ fit.coefficients)
    out = np.empty(len(times))
    for i, j in enumerate(idx):
        var_base = base_var_terms[j]
        if len(fit.names):
            q = q_terms[j]
            var_base = var_base + q @ fit.covariance @ q
        var_lam = np.exp(2 * lp) * var_base
        lam = np.exp(lp) * lam0[i]
        out[i] = np.sqrt(var_lam) / lam
    return out
