"""Logistic / linear regression fits and proper-imputation parameter draws."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from .exceptions import DataError, SeparationError, SingularInformationError

MAX_ITER = 100
TOL = 1e-10
SEPARATION_BOUND = 30.0


@dataclass
class GlmFit:
    family: str
    coefficients: np.ndarray
    covariance: np.ndarray
    residual_sd: float | None
    converged: bool
    n_obs: int


def fit_glm(outcome, design, family: str) -> GlmFit:
    """MLE via IRLS (logistic) or least squares (linear).

    ``design`` must include any intercept column explicitly.
    """
    y = np.asarray(outcome, dtype=float)
    x = np.asarray(design, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    n, p = x.shape
    if len(y) != n:
        raise DataError("length mismatch between outcome and design")
    if n <= p:
        raise DataError("more parameters than observations")
    if np.linalg.matrix_rank(x) < p:
        raise SingularInformationError("singular design")

    if family == "linear":
        beta, *_ = np.linalg.lstsq(x, y, rcond=None)
        resid = y - x @ beta
        sigma2 = float(resid @ resid) / (n - p)
        xtx_inv = np.linalg.inv(x.T @ x)
        return GlmFit(
            family="linear",
            coefficients=beta,
            covariance=sigma2 * xtx_inv,
            residual_sd=float(np.sqrt(sigma2)),
            converged=True,
            n_obs=n,
        )

    if family != "logistic":
        raise DataError(f"unknown family: {family!r}")

    beta = np.zeros(p)
    converged = False
    for _ in range(MAX_ITER):
        eta = np.clip(x @ beta, -500, 500)
        mu = expit(eta)
        w = mu * (1 - mu)
        if np.all(w < 1e-12):
            raise SeparationError("separation detected")
        score = x.T @ (y - mu)
        info = (x * w[:, None]).T @ x
        try:
            step = np.linalg.solve(info, score)
        except np.linalg.LinAlgError:
            raise SingularInformationError("singular design")
        beta = beta + step
        if np.max(np.abs(beta)) > SEPARATION_BOUND:
            raise SeparationError("separation detected")
        if np.max(np.abs(step)) < TOL:
            converged = True
            break
    eta = np.clip(x @ beta, -500, 500)
    w = expit(eta) * (1 - expit(eta))
    info = (x * w[:, None]).T @ x
    return GlmFit(
        family="logistic",
        coefficients=beta,
        covariance=np.linalg.inv(info),
        residual_sd=None,
        converged=converged,
        n_obs=n,
    )


def draw_glm_params(fit: GlmFit, rng: np.random.Generator):
    """Approximate-posterior parameter draw for proper imputation.

    Logistic: beta ~ N(beta_hat, V). Linear: draw sigma^2 from its scaled
    inverse chi-square, then beta given sigma^2.
    """
    if not fit.converged:
        raise DataError("cannot draw parameters from a non-converged fit")
    p = len(fit.coefficients)
    if fit.family == "linear":
        dof = fit.n_obs - p
        sigma2_hat = fit.residual_sd**2
        sigma2_star = sigma2_hat * dof / rng.chisquare(dof) if sigma2_hat > 0 else 0.0
        scale = sigma2_star / sigma2_hat if sigma2_hat > 0 else 0.0
        cov = scale * fit.covariance
        beta = rng.multivariate_normal(fit.coefficients, cov) if np.any(cov) else fit.coefficients.copy()
        return beta, float(np.sqrt(sigma2_star))
    beta = (
        rng.multivariate_normal(fit.coefficients, fit.covariance)
        if np.any(fit.covariance)
        else fit.coefficients.copy()
    )
    return beta, None
