import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hpobench.metrics import MetricError, mape, r_squared, rmse, timed

finite = st.floats(-1e6, 1e6, allow_nan=False)


def test_mape_fixture():
    assert mape([10, 20], [11, 18]) == pytest.approx(0.10)


def test_r2_negative_fixture():
    # SSE 8 against SST 2
    assert r_squared([1, 2, 3], [3, 2, 1]) == pytest.approx(-3.0)


def test_rmse_fixture():
    assert rmse([0, 0], [3, 0]) == pytest.approx(math.sqrt(4.5))


@given(st.lists(st.floats(0.1, 1e6), min_size=2, max_size=50))
def test_perfect_prediction(values):
    assert mape(values, values) == 0.0
    if np.ptp(values) > 0:
        assert r_squared(values, values) == 1.0


@given(st.lists(finite, min_size=2, max_size=50))
def test_mean_predictor_has_zero_r2(values):
    a = np.array(values)
    if np.ptp(a) < 1e-3:
        return
    assert r_squared(a, np.full_like(a, a.mean())) == pytest.approx(0.0, abs=1e-9)


def test_errors():
    with pytest.raises(MetricError):
        mape([0, 1], [0, 1])
    with pytest.raises(MetricError):
        r_squared([2, 2, 2], [1, 2, 3])
    with pytest.raises(MetricError):
        rmse([1, 2], [1])
    with pytest.raises(MetricError):
        r_squared([1], [1])


def test_timed_uses_given_clock():
    ticks = iter([10.0, 12.5])
    out, elapsed = timed(lambda: "x", clock=lambda: next(ticks))
    assert out == "x" and elapsed == 2.5
