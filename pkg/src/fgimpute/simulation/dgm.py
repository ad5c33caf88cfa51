"""Data-generating mechanisms for the Monte Carlo study.

Two mechanisms: one with a directly specified cause-1 cumulative incidence
(proportional subdistribution hazards hold exactly), generated by the indirect
method (draw the cause first, then the time conditional on the cause); and one
with proportional cause-specific Weibull hazards, generated via latent failure
times. Plus exponential censoring and a MAR covariate-missingness mechanism.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import pandas as pd
from scipy import optimize
from scipy.special import expit

from ..data import CompetingRisksData
from ..exceptions import DataError, NumericalError


@dataclass
class FgDgmParams:
    """Directly specified cause-1 incidence: F1 = 1 - [1 - p(1 - e^{-b1 t^a1})]^{e^eta}."""

    p: float
    a1: float = 0.75
    b1: float = 1.0
    beta1: float = 0.75
    beta2: float = 0.5
    a2: float = 0.75
    b2: float = 1.0
    beta1_star: float = 0.75
    beta2_star: float = 0.5

    def __post_init__(self):
        if not 0 < self.p < 1:
            raise DataError("p must lie in (0, 1)")
        if min(self.a1, self.b1, self.a2, self.b2) <= 0:
            raise DataError("Weibull shapes and rates must be positive")


@dataclass
class CsDgmParams:
    """Weibull cause-specific proportional hazards h_k(t) = a_k b_k t^{a_k-1} e^{eta_k}."""

    a1: float
    b1: float
    gamma11: float
    gamma12: float
    a2: float
    b2: float
    gamma21: float
    gamma22: float

    def __post_init__(self):
        if min(self.a1, self.b1, self.a2, self.b2) <= 0:
            raise DataError("Weibull shapes and rates must be positive")


def gen_covariates(n: int, rng):
    """Z ~ N(0,1); X | Z ~ Bernoulli(expit(Z))."""
    if n < 1:
        raise DataError("n must be >= 1")
    z = rng.standard_normal(n)
    x = (rng.uniform(size=n) < expit(z)).astype(float)
    return z, x


def invert_fg_cause1(u, eta, p, a1, b1):
    """Inverse of the cause-1 conditional time CDF given failure from cause 1."""
    u = np.asarray(u, dtype=float)
    e = np.exp(eta)
    inner = 1.0 - (1.0 - np.power(1.0 - u * (1.0 - (1.0 - p) ** e), 1.0 / e)) / p
    if np.any(inner <= 0) or np.any(inner > 1):
        raise NumericalError("inversion out of domain")
    return np.power(-np.log(inner) / b1, 1.0 / a1)


def _records(ids, time, status, z, x, censoring_times=None) -> CompetingRisksData:
    cov = pd.DataFrame({"X": x, "Z": z})
    return CompetingRisksData(
        ids=ids, time=time, status=status, covariates=cov, censoring_times=censoring_times
    )


def gen_fg_correct(n: int, params: FgDgmParams, rng) -> CompetingRisksData:
    """Indirect generation with exact proportional subdistribution hazards for cause 1."""
    z, x = gen_covariates(n, rng)
    eta = params.beta1 * x + params.beta2 * z
    p_cause1 = 1.0 - (1.0 - params.p) ** np.exp(eta)
    cause = np.where(rng.uniform(size=n) < p_cause1, 1, 2)
    time = np.empty(n)
    c1 = cause == 1
    u1 = rng.uniform(size=int(c1.sum()))
    time[c1] = invert_fg_cause1(u1, eta[c1], params.p, params.a1, params.b1)
    # cause 2: proportional hazards on the conditional-time scale, Weibull baseline
    c2 = ~c1
    eta_star = params.beta1_star * x[c2] + params.beta2_star * z[c2]
    u2 = rng.uniform(size=int(c2.sum()))
    time[c2] = np.power(-np.log(1.0 - u2) / (params.b2 * np.exp(eta_star)), 1.0 / params.a2)
    time = np.maximum(time, 1e-12)
    return _records(np.arange(1, n + 1), time, cause, z, x)


def gen_cs_latent(n: int, params: CsDgmParams, rng) -> CompetingRisksData:
    """Latent-failure-time generation under Weibull cause-specific hazards."""
    z, x = gen_covariates(n, rng)
    eta1 = params.gamma11 * x + params.gamma12 * z
    eta2 = params.gamma21 * x + params.gamma22 * z
    u1 = rng.uniform(size=n)
    u2 = rng.uniform(size=n)
    t1 = np.power(-np.log(u1) / (params.b1 * np.exp(eta1)), 1.0 / params.a1)
    t2 = np.power(-np.log(u2) / (params.b2 * np.exp(eta2)), 1.0 / params.a2)
    time = np.minimum(t1, t2)
    cause = np.where(t1 <= t2, 1, 2)
    time = np.maximum(time, 1e-12)
    return _records(np.arange(1, n + 1), time, cause, z, x)


def apply_censoring(data: CompetingRisksData, kind: str, rate: float = 0.49, rng=None) -> CompetingRisksData:
    """Exponential censoring; "administrative" keeps C on the record, "random" discards it."""
    if kind == "none":
        return data
    if kind not in ("administrative", "random"):
        raise DataError(f"unknown censoring kind: {kind!r}")
    n = len(data)
    c = rng.exponential(scale=1.0 / rate, size=n)
    censored = c < data.time
    time = np.minimum(data.time, c)
    status = np.where(censored, 0, data.status)
    return CompetingRisksData(
        ids=data.ids,
        time=time,
        status=status,
        covariates=data.covariates.copy(),
        censoring_times=c if kind == "administrative" else None,
    )


def impose_mar(data: CompetingRisksData, eta1: float, target_prob: float, rng) -> CompetingRisksData:
    """Mask X with logit P(missing | Z) = eta0 + eta1 Z, eta0 solved for the target rate."""
    z = data.covariates["Z"].to_numpy(dtype=float)
    eta0 = solve_mar_intercept(z, eta1, target_prob)
    p_miss = expit(eta0 + eta1 * z)
    mask = rng.uniform(size=len(data)) < p_miss
    cov = data.covariates.copy()
    x = cov["X"].to_numpy(dtype=float).copy()
    x[mask] = np.nan
    cov["X"] = x
    return CompetingRisksData(
        ids=data.ids,
        time=data.time,
        status=data.status,
        covariates=cov,
        censoring_times=None if data.censoring_times is None else data.censoring_times.copy(),
    )


def solve_mar_intercept(z, eta1: float, target_prob: float) -> float:
    """Root of mean expit(eta0 + eta1 z) = target_prob over eta0 in [-20, 20]."""

    def f(eta0):
        return float(np.mean(expit(eta0 + eta1 * z))) - target_prob

    if f(-20.0) > 0 or f(20.0) < 0:
        raise NumericalError("target missingness probability unattainable")
    return float(optimize.brentq(f, -20.0, 20.0, xtol=1e-10))


def _weibull_cs_neg_loglik(theta, t, d_k, xz):
    log_a, log_b, g1, g2 = theta
    a, b = np.exp(log_a), np.exp(log_b)
    eta = g1 * xz[:, 0] + g2 * xz[:, 1]
    log_t = np.log(t)
    ll = np.sum(d_k * (log_a + log_b + (a - 1) * log_t + eta))
    ll -= np.sum(b * np.power(t, a) * np.exp(eta))
    return -ll


def fit_weibull_cs(data: CompetingRisksData, cause: int):
    """Parametric Weibull proportional-hazards fit for one cause-specific hazard.

    Returns (a, b, gamma_x, gamma_z).
    """
    t = data.time
    d_k = (data.status == cause).astype(float)
    xz = data.covariates[["X", "Z"]].to_numpy(dtype=float)
    res = optimize.minimize(
        _weibull_cs_neg_loglik,
        x0=np.zeros(4),
        args=(t, d_k, xz),
        method="BFGS",
        options={"maxiter": 500},
    )
    if not res.success and np.max(np.abs(res.jac)) > 1e-2:
        raise NumericalError(f"Weibull cause-specific fit did not converge: {res.message}")
    log_a, log_b, g1, g2 = res.x
    return float(np.exp(log_a)), float(np.exp(log_b)), float(g1), float(g2)


def calibrate_cs_params(
    fg: FgDgmParams, censoring: str, n_big: int, seed: int, rate: float = 0.49
) -> CsDgmParams:
    """Least-false Weibull cause-specific parameters matched to the other mechanism.

    Generates a large dataset under the directly specified mechanism (with
    censoring as configured) and fits parametric Weibull proportional-hazards
    models for each cause; the point estimates become the generating values.
    """
    rng = np.random.default_rng(np.random.SeedSequence(entropy=[seed, 77]))
    data = gen_fg_correct(n_big, fg, rng)
    data = apply_censoring(data, censoring, rate=rate, rng=rng)
    a1, b1, g11, g12 = fit_weibull_cs(data, 1)
    a2, b2, g21, g22 = fit_weibull_cs(data, 2)
    return CsDgmParams(a1=a1, b1=b1, gamma11=g11, gamma12=g12, a2=a2, b2=b2, gamma21=g21, gamma22=g22)
