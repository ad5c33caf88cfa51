import numpy as np
import pytest
from scipy.special import logit

from fgimpute import draw_glm_params, fit_glm
from fgimpute.exceptions import DataError, SeparationError, SingularInformationError


def test_logistic_intercept_only_closed_form():
    y = np.array([1, 1, 1, 1, 0, 0, 0, 0, 0, 0], dtype=float)
    fit = fit_glm(y, np.ones((10, 1)), "logistic")
    assert fit.converged
    assert fit.coefficients[0] == pytest.approx(logit(0.4), abs=1e-8)


def test_linear_exact_fit():
    x = np.array([1.0, 2.0, 3.0, 4.0])
    fit = fit_glm(2.0 * x, np.column_stack([np.ones(4), x]), "linear")
    assert fit.coefficients[1] == pytest.approx(2.0)
    assert fit.coefficients[0] == pytest.approx(0.0, abs=1e-12)
    assert fit.residual_sd == pytest.approx(0.0, abs=1e-10)


def test_logistic_recovers_truth():
    rng = np.random.default_rng(3)
    n = 20000
    x = rng.standard_normal(n)
    p = 1.0 / (1.0 + np.exp(-(0.3 + 0.8 * x)))
    y = (rng.uniform(size=n) < p).astype(float)
    fit = fit_glm(y, np.column_stack([np.ones(n), x]), "logistic")
    np.testing.assert_allclose(fit.coefficients, [0.3, 0.8], atol=0.08)


def test_logistic_separation():
    y = np.zeros(10)
    with pytest.raises(SeparationError):
        fit_glm(y, np.ones((10, 1)), "logistic")


def test_rank_deficiency():
    x = np.column_stack([np.ones(10), np.ones(10)])
    with pytest.raises(SingularInformationError, match="singular design"):
        fit_glm(np.arange(10.0), x, "linear")


def test_unknown_family():
    with pytest.raises(DataError):
        fit_glm(np.zeros(5), np.ones((5, 1)), "poisson")


def test_more_params_than_obs():
    with pytest.raises(DataError):
        fit_glm(np.zeros(2), np.eye(2), "linear")


def test_draw_zero_covariance_returns_coefficients():
    fit = fit_glm(2.0 * np.arange(1.0, 5.0), np.column_stack([np.ones(4), np.arange(1.0, 5.0)]), "linear")
    rng = np.random.default_rng(0)
    beta, sigma = draw_glm_params(fit, rng)
    np.testing.assert_allclose(beta, fit.coefficients, atol=1e-10)
    assert sigma == pytest.approx(0.0, abs=1e-8)


def test_draws_reproducible():
    rng = np.random.default_rng(5)
    y = (rng.uniform(size=200) < 0.4).astype(float)
    x = np.column_stack([np.ones(200), rng.standard_normal(200)])
    fit = fit_glm(y, x, "logistic")
    b1, _ = draw_glm_params(fit, np.random.default_rng(9))
    b2, _ = draw_glm_params(fit, np.random.default_rng(9))
    np.testing.assert_array_equal(b1, b2)


def test_draw_covariance_matches_fit():
    rng = np.random.default_rng(8)
    n = 500
    x = np.column_stack([np.ones(n), rng.standard_normal(n)])
    y = (rng.uniform(size=n) < 0.5).astype(float)
    fit = fit_glm(y, x, "logistic")
    draws = np.array([draw_glm_params(fit, rng)[0] for _ in range(10000)])
    emp = np.cov(draws.T)
    np.testing.assert_allclose(emp, fit.covariance, rtol=0.10, atol=1e-4)


def test_linear_sigma_draw_distribution():
    rng = np.random.default_rng(10)
    n = 200
    x = np.column_stack([np.ones(n), rng.standard_normal(n)])
    y = x @ [1.0, 0.5] + rng.standard_normal(n)
    fit = fit_glm(y, x, "linear")
    sigmas = np.array([draw_glm_params(fit, rng)[1] for _ in range(4000)])
    # mean of the scaled inverse-chi-square draw is close to the estimate
    assert abs(sigmas.mean() - fit.residual_sd) / fit.residual_sd < 0.05
