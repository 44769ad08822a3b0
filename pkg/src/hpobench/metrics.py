"""Accuracy metrics and runtime capture."""
from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable, Tuple, TypeVar

import numpy as np

T = TypeVar("T")


class MetricError(ValueError):
    pass


@dataclass(frozen=True)
class MetricRecord:
    algorithm: str
    variate: str
    sample_size: int
    mape: float
    r2: float
    runtime_seconds: float


def _pair(actual, predicted) -> Tuple[np.ndarray, np.ndarray]:
    a = np.asarray(actual, dtype=float).ravel()
    p = np.asarray(predicted, dtype=float).ravel()
    if a.shape != p.shape:
        raise MetricError(f"length mismatch: {a.size} actual vs {p.size} predicted")
    if a.size == 0:
        raise MetricError("empty input")
    return a, p


def mape(actual, predicted) -> float:
    """Mean absolute percentage error as a fraction (0.1 == 10 %)."""
    a, p = _pair(actual, predicted)
    if np.any(a == 0):
        raise MetricError("MAPE is undefined when an actual value is zero")
    return float(np.mean(np.abs(a - p) / np.abs(a)))


def r_squared(actual, predicted) -> float:
    a, p = _pair(actual, predicted)
    if a.size < 2:
        raise MetricError("R^2 needs at least two observations")
    ss_tot = float(np.sum((a - a.mean()) ** 2))
    if ss_tot == 0:
        raise MetricError("R^2 is undefined for a constant actual series")
    return 1.0 - float(np.sum((a - p) ** 2)) / ss_tot


def rmse(actual, predicted) -> float:
    a, p = _pair(actual, predicted)
    return float(np.sqrt(np.mean((a - p) ** 2)))


def timed(f: Callable[[], T], clock: Callable[[], float] = time.perf_counter) -> Tuple[T, float]:
    """Run ``f`` and return ``(result, elapsed)`` measured on a monotonic clock."""
    t0 = clock()
    out = f()
    return out, clock() - t0
