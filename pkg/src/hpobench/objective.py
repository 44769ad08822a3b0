"""Validation objectives: hyperparameters -> fitted booster -> RMSE."""
from __future__ import annotations

from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from . import gbt
from .features import SplitError, SupervisedDataset, holdout_size
from .gbt import HyperParams
from .metrics import rmse

N_FOLDS = 5


@dataclass(frozen=True)
class ObjectiveSpec:
    """Training-portion data plus the validation protocol applied to it."""

    dataset: SupervisedDataset
    mode: str = "holdout"  # "holdout" or "cv5"
    holdout_fraction: float = 0.2
    seed: int = 0

    def __post_init__(self):
        if self.mode not in ("holdout", "cv5"):
            raise ValueError(f"unknown objective mode {self.mode!r}")

    def __call__(self, hp: HyperParams) -> float:
        return eval_cv5(self, hp) if self.mode == "cv5" else eval_holdout(self, hp)


def eval_holdout(spec: ObjectiveSpec, hp: HyperParams) -> float:
    """Fit on the earlier rows, return RMSE on the last ``holdout_fraction`` of them."""
    ds = spec.dataset
    m = len(ds)
    if m < 10:
        raise SplitError(f"holdout objective needs at least 10 rows, got {m}")
    cut = m - holdout_size(m, spec.holdout_fraction)
    model = gbt.fit(ds.X[:cut], ds.y[:cut], hp, spec.seed)
    return rmse(ds.y[cut:], gbt.predict(model, ds.X[cut:]))


def fold_bounds(m: int, k: int = N_FOLDS) -> List[Tuple[int, int]]:
    """Contiguous folds; the first ``m % k`` folds get one extra row."""
    base, extra = divmod(m, k)
    if base < 1:
        raise SplitError(f"{m} rows cannot fill {k} folds")
    bounds, start = [], 0
    for i in range(k):
        size = base + (1 if i < extra else 0)
        bounds.append((start, start + size))
        start += size
    return bounds


def eval_cv5(spec: ObjectiveSpec, hp: HyperParams) -> float:
    """Mean RMSE over 5 contiguous, unshuffled folds (train on the other four)."""
    ds = spec.dataset
    m = len(ds)
    if m < 25:
        raise SplitError(f"5-fold objective needs at least 25 rows, got {m}")
    scores = []
    for lo, hi in fold_bounds(m):
        train = np.r_[0:lo, hi:m]
        model = gbt.fit(ds.X[train], ds.y[train], hp, spec.seed)
        scores.append(rmse(ds.y[lo:hi], gbt.predict(model, ds.X[lo:hi])))
    return float(np.mean(scores))
