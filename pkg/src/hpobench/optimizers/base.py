"""Budgeted, early-stopped minimization shared by every optimizer."""
from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass
from typing import Any, Callable, List, Optional

import numpy as np

from .. import gbt

log = logging.getLogger(__name__)

Clock = Callable[[], float]


class BudgetError(ValueError):
    pass


@dataclass(frozen=True)
class BudgetPolicy:
    max_trials: int = 50
    # None disables early stopping
    patience: Optional[int] = 20

    def __post_init__(self):
        if self.max_trials < 1:
            raise BudgetError("max_trials must be >= 1")
        if self.patience is not None and not 0 <= self.patience <= self.max_trials:
            raise BudgetError("patience must lie in [0, max_trials]")


@dataclass(frozen=True)
class TrialRecord:
    index: int
    params: Any
    objective: float
    elapsed: float
    failed: bool = False


@dataclass
class OptimizationResult:
    algorithm: str
    best_params: Any
    best_objective: float
    history: List[TrialRecord]
    runtime_seconds: float
    stopped_early: bool
    fit_calls: int = 0
    selection: str = ""

    def best_so_far(self) -> np.ndarray:
        return np.minimum.accumulate([t.objective for t in self.history])


def early_stop_check(history: List[TrialRecord], patience: Optional[int]) -> bool:
    """True iff the best objective has not strictly improved in the last ``patience`` trials."""
    if patience is None or not history:
        return False
    best = math.inf
    last_improvement = 0
    for pos, rec in enumerate(history, start=1):
        if rec.objective < best:
            best = rec.objective
            last_improvement = pos
    return len(history) - last_improvement >= patience


class BudgetExhausted(Exception):
    """Raised inside an optimizer loop once the trial budget or patience runs out."""


class Tracker:
    """Evaluates points, records trials and enforces the budget.

    Optimizers call :meth:`evaluate` with unit-cube points; the tracker decodes
    them through the space, calls the objective (failures count as ``+inf``),
    and raises :class:`BudgetExhausted` once no further trial is allowed.
    """

    def __init__(self, objective, space, budget: BudgetPolicy, use_patience: bool = True,
                 clock: Clock = time.perf_counter):
        self.objective = objective
        self.space = space
        self.budget = budget
        self.patience = budget.patience if use_patience else None
        self.clock = clock
        self.history: List[TrialRecord] = []
        self.points: List[np.ndarray] = []
        self.stopped_early = False
        self._t0 = clock()
        self._fits0 = gbt.fit_calls()

    @property
    def remaining(self) -> int:
        return self.budget.max_trials - len(self.history)

    def done(self) -> bool:
        if self.remaining <= 0:
            return True
        if early_stop_check(self.history, self.patience):
            self.stopped_early = True
            return True
        return False

    def evaluate(self, u) -> float:
        if self.done():
            raise BudgetExhausted
        u = np.clip(np.asarray(u, dtype=float), 0.0, 1.0)
        params = self.space.decode(u)
        failed = False
        try:
            value = float(self.objective(params))
            if math.isnan(value):
                raise ValueError("objective returned NaN")
        except Exception as exc:  # noqa: BLE001 - any objective failure is recorded
            log.warning("trial %d failed: %s", len(self.history), exc)
            value = math.inf
            failed = True
        self.history.append(
            TrialRecord(len(self.history), params, value, self.clock() - self._t0, failed))
        self.points.append(u)
        return value

    def result(self, algorithm: str, selection: str = "") -> OptimizationResult:
        if not self.history:
            raise BudgetError("no trial was evaluated")
        objs = [t.objective for t in self.history]
        best = int(np.argmin(objs))
        runtime = self.clock() - self._t0
        return OptimizationResult(
            algorithm=algorithm,
            best_params=self.history[best].params,
            best_objective=objs[best],
            history=list(self.history),
            runtime_seconds=runtime,
            stopped_early=self.stopped_early,
            fit_calls=gbt.fit_calls() - self._fits0,
            selection=selection,
        )
