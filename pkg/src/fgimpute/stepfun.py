"""Right-continuous step functions on [0, inf)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class StepFunction:
    """Nondecreasing sequence of jump times with right-continuous evaluation.

    Value on [0, jump_times[0]) is ``initial_value``; on
    [jump_times[i], jump_times[i+1]) it is ``values[i]``.
    """

    jump_times: np.ndarray
    values: np.ndarray
    initial_value: float = 0.0

    def __post_init__(self):
        jt = np.asarray(self.jump_times, dtype=float)
        vals = np.asarray(self.values, dtype=float)
        if jt.ndim != 1 or vals.ndim != 1 or jt.shape != vals.shape:
            raise ValueError("jump_times and values must be 1-d arrays of equal length")
        if jt.size and (np.any(jt <= 0) or np.any(np.diff(jt) <= 0)):
            raise ValueError("jump_times must be strictly increasing and positive")
        object.__setattr__(self, "jump_times", jt)
        object.__setattr__(self, "values", vals)

    def __call__(self, t):
        """Evaluate at t (right-continuous): value at the largest jump time <= t."""
        t = np.asarray(t, dtype=float)
        idx = np.searchsorted(self.jump_times, t, side="right")
        padded = np.concatenate([[self.initial_value], self.values])
        out = padded[idx]
        return out if out.ndim else float(out)

    def left_limit(self, t):
        """Evaluate the left limit at t: value at the largest jump time < t."""
        t = np.asarray(t, dtype=float)
        idx = np.searchsorted(self.jump_times, t, side="left")
        padded = np.concatenate([[self.initial_value], self.values])
        out = padded[idx]
        return out if out.ndim else float(out)

    @property
    def terminal_value(self) -> float:
        return float(self.values[-1]) if self.values.size else float(self.initial_value)
