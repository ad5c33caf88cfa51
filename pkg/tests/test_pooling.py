import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fgimpute import cloglog, inv_cloglog, pool_cuminc, rubin_pool
from fgimpute.exceptions import DataError
from fgimpute.pooling import _barnard_rubin_df


def test_identical_imputations():
    res = rubin_pool([1.0, 1.0], [0.04, 0.04])
    assert res.estimate == 1.0
    assert res.between_var == 0.0
    assert res.total_var == pytest.approx(0.04)


def test_hand_formulas():
    res = rubin_pool([0.9, 1.1], [0.04, 0.04])
    assert res.estimate == pytest.approx(1.0)
    assert res.within_var == pytest.approx(0.04)
    assert res.between_var == pytest.approx(0.02)
    assert res.total_var == pytest.approx(0.04 + 1.5 * 0.02)


def test_single_imputation_flagged():
    res = rubin_pool([2.0], [0.09])
    assert res.single_imputation
    assert res.total_var == pytest.approx(0.09)
    assert res.std_error == pytest.approx(0.3)


def test_barnard_rubin_large_sample():
    # m=3, B=1, W=0.5: lambda = (4/3)/(11/6), df_old = 2/lambda^2
    m, b, w = 3, 1.0, 0.5
    total = w + (1 + 1 / m) * b
    lam = (1 + 1 / m) * b / total
    df_old = (m - 1) / lam**2
    res = rubin_pool([1.0, 2.0, 3.0], [0.5, 0.5, 0.5])
    assert res.df == pytest.approx(df_old)


def test_barnard_rubin_finite_complete_df():
    m, b, w, n_complete = 3, 1.0, 0.5, 100.0
    total = w + (1 + 1 / m) * b
    lam = (1 + 1 / m) * b / total
    df_old = (m - 1) / lam**2
    df_obs = (n_complete + 1) / (n_complete + 3) * n_complete * (1 - lam)
    expected = df_old * df_obs / (df_old + df_obs)
    res = rubin_pool([1.0, 2.0, 3.0], [0.5, 0.5, 0.5], n_complete=n_complete)
    assert res.df == pytest.approx(expected)
    assert _barnard_rubin_df(m, b, total, n_complete) == pytest.approx(expected)


def test_pool_is_mean_and_permutation_invariant():
    rng = np.random.default_rng(1)
    est = rng.standard_normal(8)
    var = rng.uniform(0.1, 0.5, size=8)
    a = rubin_pool(est, var)
    perm = rng.permutation(8)
    b = rubin_pool(est[perm], var[perm])
    assert a.estimate == pytest.approx(est.mean())
    assert a.total_var == pytest.approx(b.total_var)
    assert a.ci_low == pytest.approx(b.ci_low)


def test_ci_width_nonincreasing_in_m():
    widths = []
    for m in (2, 6, 20, 100):
        est = np.tile([0.9, 1.1], m // 2)
        var = np.full(m, 0.04)
        res = rubin_pool(est, var)
        widths.append(res.ci_high - res.ci_low)
    assert all(w1 >= w2 - 1e-12 for w1, w2 in zip(widths, widths[1:]))


def test_ci_contains_estimate():
    res = rubin_pool([0.4, 0.6, 0.5], [0.01, 0.01, 0.01])
    assert res.ci_low <= res.estimate <= res.ci_high


def test_input_validation():
    with pytest.raises(DataError):
        rubin_pool([1.0, 2.0], [0.1])
    with pytest.raises(DataError):
        rubin_pool([], [])
    with pytest.raises(DataError):
        rubin_pool([1.0], [-0.1])
    with pytest.raises(DataError):
        rubin_pool([1.0], [0.1], confidence=1.5)


def test_cloglog_round_trip():
    f = np.array([0.75, 0.01, 0.5, 0.999])
    np.testing.assert_allclose(inv_cloglog(cloglog(f)), f, atol=1e-12)


def test_cloglog_rejects_boundary():
    with pytest.raises(DataError, match="transformation undefined"):
        cloglog([0.0, 0.5])
    with pytest.raises(DataError, match="transformation undefined"):
        cloglog([0.5, 1.0])


def test_pool_cuminc_identical_curves():
    times = np.array([1.0, 2.0, 3.0])
    curve = np.array([0.1, 0.2, 0.3])
    est = np.tile(curve, (4, 1))
    se = np.full((4, 3), 0.1)
    pooled, lo, hi, _ = pool_cuminc(times, est, se)
    np.testing.assert_allclose(pooled, curve, atol=1e-12)
    assert np.all(lo <= pooled)
    assert np.all(pooled <= hi)


def test_pool_cuminc_boundary_rejected():
    with pytest.raises(DataError):
        pool_cuminc([1.0], [[0.0]], [[0.1]])


def test_pool_cuminc_monotone_output():
    rng = np.random.default_rng(6)
    times = np.arange(1.0, 6.0)
    est = np.sort(rng.uniform(0.05, 0.9, size=(5, 5)), axis=1)
    se = rng.uniform(0.05, 0.2, size=(5, 5))
    pooled, lo, hi, _ = pool_cuminc(times, est, se)
    assert np.all(np.diff(pooled) >= -1e-12)
    assert np.all((pooled > 0) & (pooled < 1))


def test_pool_cuminc_shape_mismatch():
    with pytest.raises(DataError):
        pool_cuminc([1.0, 2.0], [[0.1, 0.2]], [[0.1]])


@given(
    est=st.lists(st.floats(-5.0, 5.0), min_size=2, max_size=12),
    var=st.floats(0.01, 2.0),
)
def test_pool_properties(est, var):
    res = rubin_pool(est, [var] * len(est))
    assert res.estimate == pytest.approx(np.mean(est))
    assert res.total_var >= res.within_var - 1e-12
    assert res.ci_low <= res.estimate <= res.ci_high
