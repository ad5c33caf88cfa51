"""Kaplan-Meier and Nelson-Aalen estimators for right-censored data."""

from __future__ import annotations

import numpy as np

from .data import CompetingRisksData
from .exceptions import DataError
from .stepfun import StepFunction


def _risk_table(times, events):
    times = np.asarray(times, dtype=float)
    events = np.asarray(events, dtype=bool)
    if times.size == 0:
        raise DataError("empty dataset")
    if times.shape != events.shape:
        raise DataError("times and events must have equal length")
    if np.any(times <= 0):
        raise DataError("times must be positive")
    order = np.argsort(times, kind="stable")
    t = times[order]
    e = events[order]
    uniq, start = np.unique(t, return_index=True)
    # deaths per unique time, number at risk just before each unique time
    d = np.add.reduceat(e.astype(int), start)
    n_at_risk = len(t) - start
    keep = d > 0
    return uniq[keep], d[keep], n_at_risk[keep]


def kaplan_meier(times, events) -> StepFunction:
    """Product-limit survival estimate; jumps only at event times, S(0) = 1."""
    t, d, n = _risk_table(times, events)
    surv = np.cumprod(1.0 - d / n)
    return StepFunction(jump_times=t, values=surv, initial_value=1.0)


def nelson_aalen(times, events) -> StepFunction:
    """Cumulative hazard estimate H(t) = sum of d_i/n_i over event times <= t."""
    t, d, n = _risk_table(times, events)
    cumhaz = np.cumsum(d / n)
    return StepFunction(jump_times=t, values=cumhaz, initial_value=0.0)


def marginal_cs_cumhaz(data: CompetingRisksData, cause: int) -> np.ndarray:
    """Nelson-Aalen cause-specific cumulative hazard evaluated at each record's T."""
    if cause not in (1, 2):
        raise DataError("cause must be 1 or 2")
    na = nelson_aalen(data.time, data.status == cause)
    return np.asarray(na(data.time))
