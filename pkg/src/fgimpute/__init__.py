"""Multiple imputation of missing covariates for subdistribution-hazard models."""

from .censoring import (
    CensoringModel,
    fit_censoring_km,
    impute_censoring_times,
    make_censoring_complete,
    marginal_subdist_cumhaz,
)
from .cox import CoxFit, breslow_baseline, cuminc_se, fit_cox, predict_cuminc
from .data import CompetingRisksData, SubdistDataset
from .glm import GlmFit, draw_glm_params, fit_glm
from .imputation import (
    ImputationConfig,
    impute_approx,
    impute_covariates,
    impute_smc,
    smc_conditional_density,
)
from .nonparametric import kaplan_meier, marginal_cs_cumhaz, nelson_aalen
from .pipeline import AnalysisResult, run_pipeline
from .pooling import PooledResult, cloglog, inv_cloglog, pool_cuminc, rubin_pool
from .stepfun import StepFunction

__version__ = "0.1.0"

__all__ = [
    "AnalysisResult",
    "CensoringModel",
    "CompetingRisksData",
    "CoxFit",
    "GlmFit",
    "ImputationConfig",
    "PooledResult",
    "StepFunction",
    "SubdistDataset",
    "breslow_baseline",
    "cloglog",
    "cuminc_se",
    "draw_glm_params",
    "fit_censoring_km",
    "fit_cox",
    "fit_glm",
    "impute_approx",
    "impute_censoring_times",
    "impute_covariates",
    "impute_smc",
    "inv_cloglog",
    "kaplan_meier",
    "make_censoring_complete",
    "marginal_cs_cumhaz",
    "marginal_subdist_cumhaz",
    "nelson_aalen",
    "pool_cuminc",
    "predict_cuminc",
    "rubin_pool",
    "run_pipeline",
    "smc_conditional_density",
]
