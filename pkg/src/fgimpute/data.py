"""Dataset containers for competing-risks records and censoring-complete data."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import pandas as pd

from .exceptions import DataError

CENSORED, CAUSE1, CAUSE2 = 0, 1, 2


@dataclass
class CompetingRisksData:
    """Observed competing-risks data: follow-up time T, cause indicator D in {0,1,2}.

    ``covariates`` may contain NaN entries, which mark missing values. The
    observation mask is derived from NaN rather than stored separately.
    ``censoring_times`` holds the known potential censoring time C per record
    when censoring is administrative; None otherwise.
    """

    ids: np.ndarray
    time: np.ndarray
    status: np.ndarray
    covariates: pd.DataFrame
    censoring_times: np.ndarray | None = None

    def __post_init__(self):
        self.ids = np.asarray(self.ids)
        self.time = np.asarray(self.time, dtype=float)
        self.status = np.asarray(self.status, dtype=int)
        if len(self.ids) != len(np.unique(self.ids)):
            raise DataError("duplicate identifiers")
        n = len(self.time)
        if len(self.ids) != n or len(self.status) != n or len(self.covariates) != n:
            raise DataError("length mismatch between columns")
        if np.any(~np.isfinite(self.time)) or np.any(self.time <= 0):
            raise DataError("follow-up times must be positive and finite")
        if not np.all(np.isin(self.status, [0, 1, 2])):
            raise DataError("status values must be within {0, 1, 2}")
        self.covariates = self.covariates.reset_index(drop=True)
        if self.censoring_times is not None:
            self.censoring_times = np.asarray(self.censoring_times, dtype=float)
            if len(self.censoring_times) != n:
                raise DataError("length mismatch for censoring times")

    def __len__(self) -> int:
        return len(self.time)

    @property
    def mask(self) -> pd.DataFrame:
        """True where the covariate value is observed."""
        return self.covariates.notna()


@dataclass
class SubdistDataset:
    """Censoring-complete data: subdistribution time V and the cause-1 indicator.

    Cause-1 failures keep V = T; censored records keep V = T; cause-2 failures
    carry an imputed (or administratively known) V > T, flagged by
    ``v_imputed``. Derived hazard columns (H1/H2 at T, Lambda1 at V) are
    attached by the pipeline when needed.
    """

    ids: np.ndarray
    v_time: np.ndarray
    event1: np.ndarray
    status: np.ndarray
    time: np.ndarray
    covariates: pd.DataFrame
    v_imputed: np.ndarray
    cs_cumhaz1: np.ndarray | None = None
    cs_cumhaz2: np.ndarray | None = None
    subdist_cumhaz1: np.ndarray | None = None

    def __post_init__(self):
        self.v_time = np.asarray(self.v_time, dtype=float)
        self.event1 = np.asarray(self.event1, dtype=bool)
        self.status = np.asarray(self.status, dtype=int)
        self.time = np.asarray(self.time, dtype=float)
        self.v_imputed = np.asarray(self.v_imputed, dtype=bool)
        self.covariates = self.covariates.reset_index(drop=True)
        d1 = self.status == CAUSE1
        if not np.allclose(self.v_time[d1], self.time[d1]):
            raise DataError("cause-1 records must keep V = T")
        d2 = self.status == CAUSE2
        if np.any(self.v_time[d2] < self.time[d2]):
            raise DataError("cause-2 records require V >= T")

    def __len__(self) -> int:
        return len(self.v_time)

    def copy(self) -> "SubdistDataset":
        return SubdistDataset(
            ids=self.ids.copy(),
            v_time=self.v_time.copy(),
            event1=self.event1.copy(),
            status=self.status.copy(),
            time=self.time.copy(),
            covariates=self.covariates.copy(),
            v_imputed=self.v_imputed.copy(),
            cs_cumhaz1=None if self.cs_cumhaz1 is None else self.cs_cumhaz1.copy(),
            cs_cumhaz2=None if self.cs_cumhaz2 is None else self.cs_cumhaz2.copy(),
            subdist_cumhaz1=None if self.subdist_cumhaz1 is None else self.subdist_cumhaz1.copy(),
        )
