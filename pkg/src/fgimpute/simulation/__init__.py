from .dgm import (
    CsDgmParams,
    FgDgmParams,
    apply_censoring,
    calibrate_cs_params,
    gen_covariates,
    gen_cs_latent,
    gen_fg_correct,
    impose_mar,
    invert_fg_cause1,
)
from .estimands import least_false_beta, true_cuminc
from .study import ScenarioConfig, run_scenario

__all__ = [
    "CsDgmParams",
    "FgDgmParams",
    "ScenarioConfig",
    "apply_censoring",
    "calibrate_cs_params",
    "gen_covariates",
    "gen_cs_latent",
    "gen_fg_correct",
    "impose_mar",
    "invert_fg_cause1",
    "least_false_beta",
    "run_scenario",
    "true_cuminc",
]
