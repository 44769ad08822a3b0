"""Lag-window supervised datasets for one-hour-ahead demand forecasting."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .data import TimeSeriesFrame

DEFAULT_LAGS = 24


class InsufficientHistoryError(ValueError):
    pass


class SplitError(ValueError):
    pass


@dataclass(frozen=True)
class LagConfig:
    S: int = DEFAULT_LAGS
    multivariate: bool = False

    def __post_init__(self):
        if self.S < 1:
            raise ValueError("S must be >= 1")


@dataclass(frozen=True)
class SupervisedDataset:
    """Design matrix ``X`` (m, p) and next-hour target ``y`` (m,).

    ``timestamps[i]`` is the hour that ``y[i]`` belongs to; every predictor
    in row ``i`` comes from strictly earlier hours.
    """

    X: np.ndarray
    y: np.ndarray
    feature_names: Tuple[str, ...]
    timestamps: np.ndarray

    def __len__(self) -> int:
        return len(self.y)

    @property
    def n_features(self) -> int:
        return self.X.shape[1]

    def rows(self, idx) -> "SupervisedDataset":
        return SupervisedDataset(self.X[idx], self.y[idx], self.feature_names, self.timestamps[idx])


@dataclass(frozen=True)
class SplitPair:
    train: SupervisedDataset
    test: SupervisedDataset
    split_index: int


def _lag_block(series: np.ndarray, S: int) -> np.ndarray:
    # row i holds series[i .. i+S-1]; the target of row i is at i+S
    return sliding_window_view(series, S)[:-1]


def make_supervised(frame: TimeSeriesFrame, cfg: LagConfig = LagConfig()) -> SupervisedDataset:
    """Turn a frame into lagged rows predicting the next hour.

    Univariate rows hold the previous ``S`` target values (oldest first).
    Multivariate rows append, for each exogenous column, that column's values
    over the same ``S`` hours, giving ``S * (1 + D)`` predictors.
    """
    n, S = len(frame), cfg.S
    if n <= S:
        raise InsufficientHistoryError(f"need more than S={S} rows, got {n}")
    blocks = [_lag_block(frame.target, S)]
    names = [f"{frame.target_name}_lag{S - j}" for j in range(S)]
    if cfg.multivariate:
        for c, col in enumerate(frame.feature_names):
            blocks.append(_lag_block(frame.features[:, c], S))
            names.extend(f"{col}_lag{S - j}" for j in range(S))
    X = np.ascontiguousarray(np.hstack(blocks), dtype=float)
    y = frame.target[S:].astype(float, copy=True)
    return SupervisedDataset(X, y, tuple(names), frame.timestamps[S:])


def holdout_size(m: int, fraction: float) -> int:
    # tolerate float noise such as 0.7 * 10 = 7.000000000000001
    return int(math.ceil(m * fraction - 1e-9))


def chrono_split(ds: SupervisedDataset, test_fraction: float = 0.2) -> SplitPair:
    """Hold out the last ``ceil(m * test_fraction)`` rows as the test set."""
    if not 0.0 < test_fraction < 1.0:
        raise SplitError("test_fraction must lie in (0, 1)")
    m = len(ds)
    n_test = holdout_size(m, test_fraction)
    if n_test < 1 or n_test >= m:
        raise SplitError(f"fraction {test_fraction} of {m} rows leaves an empty partition")
    cut = m - n_test
    return SplitPair(ds.rows(slice(0, cut)), ds.rows(slice(cut, m)), cut)
