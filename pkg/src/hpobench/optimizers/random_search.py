import time

import numpy as np

from .base import BudgetExhausted, BudgetPolicy, OptimizationResult, Tracker


def run_random_search(objective, space, budget: BudgetPolicy = BudgetPolicy(), seed: int = 0,
                      clock=time.perf_counter) -> OptimizationResult:
    """Evaluate ``budget.max_trials`` independent uniform draws; never stops early.

    In the benchmark the objective passed here is the 5-fold CV score.
    """
    rng = np.random.default_rng(seed)
    tracker = Tracker(objective, space, budget, use_patience=False, clock=clock)
    try:
        while True:
            tracker.evaluate(space.sample_unit(rng))
    except BudgetExhausted:
        pass
    return tracker.result("random")
