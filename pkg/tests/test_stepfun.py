import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fgimpute import StepFunction


@pytest.fixture
def sf():
    return StepFunction(jump_times=np.array([1.0, 2.0]), values=np.array([10.0, 20.0]))


def test_right_continuous_evaluation(sf):
    assert sf(0.0) == 0.0
    assert sf(0.5) == 0.0
    assert sf(1.0) == 10.0
    assert sf(1.5) == 10.0
    assert sf(2.0) == 20.0
    assert sf(100.0) == 20.0


def test_left_limit(sf):
    assert sf.left_limit(1.0) == 0.0
    assert sf.left_limit(1.5) == 10.0
    assert sf.left_limit(2.0) == 10.0
    assert sf.left_limit(2.5) == 20.0


def test_vectorised_call(sf):
    out = sf(np.array([0.5, 1.0, 3.0]))
    np.testing.assert_array_equal(out, [0.0, 10.0, 20.0])


def test_terminal_value(sf):
    assert sf.terminal_value == 20.0


def test_empty_function_uses_initial_value():
    sf = StepFunction(np.array([]), np.array([]), initial_value=1.0)
    assert sf(5.0) == 1.0
    assert sf.left_limit(5.0) == 1.0
    assert sf.terminal_value == 1.0


def test_nonincreasing_jumps_rejected():
    with pytest.raises(ValueError):
        StepFunction(np.array([2.0, 1.0]), np.array([1.0, 2.0]))
    with pytest.raises(ValueError):
        StepFunction(np.array([1.0, 1.0]), np.array([1.0, 2.0]))


def test_nonpositive_jump_rejected():
    with pytest.raises(ValueError):
        StepFunction(np.array([0.0, 1.0]), np.array([1.0, 2.0]))


def test_shape_mismatch_rejected():
    with pytest.raises(ValueError):
        StepFunction(np.array([1.0, 2.0]), np.array([1.0]))


@given(
    jumps=st.lists(st.floats(0.01, 100.0), min_size=1, max_size=8, unique=True),
    query=st.floats(-1.0, 120.0),
)
def test_piecewise_constant_between_jumps(jumps, query):
    jumps = np.sort(np.asarray(jumps))
    sf = StepFunction(jumps, np.cumsum(np.ones_like(jumps)))
    value = float(sf(query))
    assert value == float(np.searchsorted(jumps, query, side="right"))
