"""Rubin's-rules combination of per-imputation estimates."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import stats

from .exceptions import DataError


@dataclass
class PooledResult:
    estimate: float
    within_var: float
    between_var: float
    total_var: float
    df: float
    ci_low: float
    ci_high: float
    m: int
    single_imputation: bool = False

    @property
    def std_error(self) -> float:
        return float(np.sqrt(self.total_var))


def _barnard_rubin_df(m, between, total, n_complete) -> float:
    """Small-sample adjusted degrees of freedom.

    ``n_complete`` is the complete-data degrees of freedom of the analysis
    model; np.inf falls back to the classical large-sample formula.
    """
    lam = (1 + 1 / m) * between / total if total > 0 else 0.0
    if lam <= 0:
        df_old = np.inf
    else:
        df_old = (m - 1) / lam**2
    if not np.isfinite(n_complete):
        return float(df_old) if np.isfinite(df_old) else 1e12
    df_obs = (n_complete + 1) / (n_complete + 3) * n_complete * (1 - lam)
    if not np.isfinite(df_old):
        return float(df_obs)
    return float(df_old * df_obs / (df_old + df_obs))


def rubin_pool(estimates, variances, confidence=0.95, n_complete=np.inf) -> PooledResult:
    """Pool M point estimates and their variances.

    M = 1 is permitted (between-variance zero, single_imputation flag set).
    """
    q = np.asarray(estimates, dtype=float)
    u = np.asarray(variances, dtype=float)
    if q.shape != u.shape or q.ndim != 1:
        raise DataError("estimates and variances must be 1-d arrays of equal length")
    if q.size == 0:
        raise DataError("empty input")
    if np.any(u < 0):
        raise DataError("variances must be nonnegative")
    if not 0 < confidence < 1:
        raise DataError("confidence must lie in (0, 1)")
    m = q.size
    qbar = float(q.mean())
    w = float(u.mean())
    if m == 1:
        b = 0.0
        total = w
        single = True
    else:
        b = float(q.var(ddof=1))
        total = w + (1 + 1 / m) * b
        single = False
    df = _barnard_rubin_df(m, b, total, n_complete)
    se = np.sqrt(total)
    if np.isfinite(df):
        crit = stats.t.ppf(0.5 + confidence / 2, df)
    else:
        crit = stats.norm.ppf(0.5 + confidence / 2)
    return PooledResult(
        estimate=qbar,
        within_var=w,
        between_var=b,
        total_var=total,
        df=df,
        ci_low=qbar - crit * se,
        ci_high=qbar + crit * se,
        m=m,
        single_imputation=single,
    )


def cloglog(f):
    """log(-log(1 - F)); defined for F strictly inside (0, 1)."""
    f = np.asarray(f, dtype=float)
    if np.any(f <= 0) or np.any(f >= 1):
        raise DataError("transformation undefined; restrict grid")
    return np.log(-np.log1p(-f))


def inv_cloglog(theta):
    theta = np.asarray(theta, dtype=float)
    return 1.0 - np.exp(-np.exp(theta))


def pool_cuminc(times, estimates, ses, confidence=0.95, n_complete=np.inf):
    """Pointwise Rubin pooling of incidence curves on the cloglog scale.

    ``estimates`` is an (M, K) array of F1 values over a common time grid of
    length K; ``ses`` the matching standard errors already on the cloglog
    scale. Returns arrays (estimate, ci_low, ci_high, std_error_cloglog).
    """
    times = np.asarray(times, dtype=float)
    est = np.atleast_2d(np.asarray(estimates, dtype=float))
    se = np.atleast_2d(np.asarray(ses, dtype=float))
    if est.shape != se.shape or est.shape[1] != len(times):
        raise DataError("shape mismatch between times, estimates and ses")
    theta = cloglog(est)
    pooled_est = np.empty(len(times))
    lo = np.empty(len(times))
    hi = np.empty(len(times))
    pooled_se = np.empty(len(times))
    for k in range(len(times)):
        res = rubin_pool(theta[:, k], se[:, k] ** 2, confidence=confidence, n_complete=n_complete)
        pooled_est[k] = inv_cloglog(res.estimate)
        lo[k] = inv_cloglog(res.ci_low)
        hi[k] = inv_cloglog(res.ci_high)
        pooled_se[k] = res.std_error
    return pooled_est, lo, hi, pooled_se
