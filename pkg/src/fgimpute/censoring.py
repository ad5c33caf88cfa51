"""Construction of censoring-complete datasets.

Records failing from the competing cause have an unknown potential censoring
time; it is multiply imputed from the (possibly stratified) Kaplan-Meier
estimate of the censoring distribution, conditional on C > T. Administrative
censoring and absence of censoring admit deterministic shortcuts.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import CAUSE1, CAUSE2, CENSORED, CompetingRisksData, SubdistDataset
from .exceptions import DataError
from .nonparametric import kaplan_meier, nelson_aalen
from .stepfun import StepFunction

TAIL_FACTOR = 1.01


@dataclass
class CensoringModel:
    """Per-stratum reverse Kaplan-Meier survival functions G(t) = P(C > t)."""

    strata: dict
    strata_covariates: tuple
    tail_time: float

    def stratum_key(self, row) -> tuple:
        return tuple(row[c] for c in self.strata_covariates)


def _stratum_keys(data: CompetingRisksData, strata_covariates):
    if not strata_covariates:
        return [()] * len(data)
    sub = data.covariates[list(strata_covariates)]
    if sub.isna().any().any():
        raise DataError("stratification covariates must be complete")
    return [tuple(row) for row in sub.itertuples(index=False)]


def fit_censoring_km(data: CompetingRisksData, strata_covariates=(), bootstrap=False) -> CensoringModel:
    """Reverse KM of the censoring times: event = I(D = 0), failures censored at T.

    ``bootstrap`` is reserved for resampling G before imputation; not
    implemented (imputation proceeds from the point estimate).
    """
    if bootstrap:
        raise NotImplementedError("bootstrap of the censoring distribution is not implemented")
    keys = _stratum_keys(data, strata_covariates)
    tail_time = TAIL_FACTOR * float(np.max(data.time))
    strata = {}
    is_cens = data.status == CENSORED
    for key in sorted(set(keys)):
        in_stratum = np.array([k == key for k in keys])
        if not in_stratum.any():
            raise DataError("empty stratum")
        times = data.time[in_stratum]
        events = is_cens[in_stratum]
        if events.any():
            strata[key] = kaplan_meier(times, events)
        else:
            strata[key] = StepFunction(np.array([]), np.array([]), initial_value=1.0)
    return CensoringModel(strata=strata, strata_covariates=tuple(strata_covariates), tail_time=tail_time)


def _draw_conditional_censoring(g: StepFunction, t0: float, u: float, tail_time: float) -> float:
    """Inverse-CDF draw from P(C <= t | C > t0) = 1 - G(t)/G(t0-)."""
    g_t0 = g.left_limit(t0)
    if g_t0 <= 0:
        return tail_time
    jumps = g.jump_times
    later = jumps > t0
    if not later.any():
        return tail_time
    ratios = g.values[later] / g_t0
    hit = ratios <= u
    if not hit.any():
        return tail_time
    return float(jumps[later][np.argmax(hit)])


def impute_censoring_times(
    data: CompetingRisksData, model: CensoringModel, m: int, seed: int
) -> list[SubdistDataset]:
    """Draw m censoring-complete datasets; only cause-2 records get a new V.

    Each imputation index uses an independent substream derived from
    (seed, index), so results are reproducible and order-independent.
    """
    if m < 1:
        raise DataError("m must be >= 1")
    keys = _stratum_keys(data, model.strata_covariates)
    is_c2 = data.status == CAUSE2
    out = []
    for k in range(m):
        rng = np.random.default_rng(np.random.SeedSequence(entropy=[seed, k]))
        v = data.time.copy()
        u = rng.uniform(size=int(is_c2.sum()))
        for j, i in enumerate(np.flatnonzero(is_c2)):
            g = model.strata[keys[i]]
            v[i] = _draw_conditional_censoring(g, data.time[i], u[j], model.tail_time)
        out.append(
            SubdistDataset(
                ids=data.ids,
                v_time=v,
                event1=data.status == CAUSE1,
                status=data.status,
                time=data.time,
                covariates=data.covariates.copy(),
                v_imputed=is_c2,
            )
        )
    return out


def make_censoring_complete(data: CompetingRisksData, mode: str) -> SubdistDataset:
    """Deterministic censoring-complete dataset.

    mode "no_censoring": cause-2 records get V past every observed time.
    mode "administrative": cause-2 records get their known censoring time C.
    """
    v = data.time.copy()
    is_c2 = data.status == CAUSE2
    v_imputed = np.zeros(len(data), dtype=bool)
    if mode == "no_censoring":
        v[is_c2] = 2.0 * float(np.max(data.time))
    elif mode == "administrative":
        if data.censoring_times is None or np.any(~np.isfinite(data.censoring_times[is_c2])):
            raise DataError("administrative mode requires known censoring times for cause-2 records")
        c = data.censoring_times[is_c2]
        if np.any(c < data.time[is_c2]):
            raise DataError("censoring time precedes failure")
        v[is_c2] = c
    else:
        raise DataError(f"unknown censoring-complete mode: {mode!r}")
    return SubdistDataset(
        ids=data.ids,
        v_time=v,
        event1=data.status == CAUSE1,
        status=data.status,
        time=data.time,
        covariates=data.covariates.copy(),
        v_imputed=v_imputed,
    )


def marginal_subdist_cumhaz(sd: SubdistDataset):
    """Nelson-Aalen cumulative subdistribution hazard for cause 1 on (V, I(D=1)).

    Returns the per-record values at each V and the full step function.
    """
    na = nelson_aalen(sd.v_time, sd.event1)
    return np.asarray(na(sd.v_time)), na
