import numpy as np
import pytest
from dataclasses import replace
from hypothesis import given, strategies as st

from hpobench.data import synth_demand
from hpobench.features import (InsufficientHistoryError, LagConfig, SplitError, chrono_split,
                               holdout_size, make_supervised)


@pytest.fixture(scope="module")
def frame():
    return synth_demand(200, seed=0)


def test_shapes(frame):
    d = frame.features.shape[1]
    uni = make_supervised(frame, LagConfig(24))
    multi = make_supervised(frame, LagConfig(24, multivariate=True))
    assert uni.X.shape == (176, 24)
    assert multi.X.shape == (176, 24 * (1 + d))
    assert uni.feature_names[0] == "nat_demand_lag24"
    assert uni.feature_names[-1] == "nat_demand_lag1"


def test_rows_hold_previous_values(frame):
    ds = make_supervised(frame, LagConfig(3))
    np.testing.assert_array_equal(ds.X[0], frame.target[:3])
    assert ds.y[0] == frame.target[3]
    assert ds.timestamps[0] == frame.timestamps[3]


def test_exogenous_lags_exclude_current_hour(frame):
    ds = make_supervised(frame, LagConfig(2, multivariate=True))
    # the first exogenous block of row 0 covers hours 0 and 1; the target is hour 2
    np.testing.assert_array_equal(ds.X[0, 2:4], frame.features[:2, 0])


@given(st.integers(1, 30), st.integers(0, 20))
def test_increasing_series_gives_increasing_targets(S, extra):
    n = S + 1 + extra
    base = synth_demand(n, seed=0)
    f = replace(base, target=np.arange(n, dtype=float) * 1.5)
    ds = make_supervised(f, LagConfig(S))
    assert np.all(np.diff(ds.y) > 0)
    # no leakage: every lag is strictly older than the target
    assert np.all(ds.X.max(axis=1) < ds.y)


def test_too_short(frame):
    with pytest.raises(InsufficientHistoryError):
        make_supervised(frame.select(slice(0, 24)), LagConfig(24))


def test_split_sizes(frame):
    ds = make_supervised(frame, LagConfig(24))
    pair = chrono_split(ds, 0.2)
    assert len(pair.test) == holdout_size(176, 0.2) == 36
    assert len(pair.train) + len(pair.test) == 176
    assert pair.train.timestamps[-1] < pair.test.timestamps[0]


@given(st.integers(2, 500), st.floats(0.05, 0.95))
def test_split_partitions_in_order(m, frac):
    if holdout_size(m, frac) >= m:
        return
    frame = synth_demand(m + 1, seed=0)
    pair = chrono_split(make_supervised(frame, LagConfig(1)), frac)
    assert len(pair.train) + len(pair.test) == m
    assert len(pair.test) >= 1
    assert np.all(np.diff(np.concatenate([pair.train.timestamps, pair.test.timestamps]))
                  > np.timedelta64(0, "s"))


def test_holdout_size_tolerates_float_noise():
    assert holdout_size(10, 0.7) == 7
    assert holdout_size(103, 0.2) == 21


@pytest.mark.parametrize("frac", [0.0, 1.0, 1.5])
def test_split_rejects_bad_fraction(frame, frac):
    with pytest.raises(SplitError):
        chrono_split(make_supervised(frame, LagConfig(4)), frac)
