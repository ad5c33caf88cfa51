"""Exception hierarchy shared across the package."""


class FgImputeError(Exception):
    """Base class for package errors."""


class DataError(FgImputeError):
    """Invalid or inconsistent input data."""


class NumericalError(FgImputeError):
    """Numerical failure (non-convergence, separation, singularity)."""


class SeparationError(NumericalError):
    """Monotone likelihood / divergent coefficients."""


class SingularInformationError(NumericalError):
    """Information matrix (or design) is singular."""


class ConfigError(FgImputeError):
    """Invalid configuration."""
