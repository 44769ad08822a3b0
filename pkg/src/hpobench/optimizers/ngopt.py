"""Rule-based portfolio that picks one of the in-repo optimizers.

The rule table looks only at the problem dimension and the trial budget:

==============================  ==========
condition                       delegate
==============================  ==========
budget < 2 * dimension          random
dimension <= 10, budget <= 100  cmaes
otherwise                       pso
==============================  ==========
"""
import time

from .base import BudgetPolicy, OptimizationResult
from .cmaes import run_cmaes
from .pso import run_pso
from .random_search import run_random_search

_DELEGATES = {
    "random": run_random_search,
    "cmaes": run_cmaes,
    "pso": run_pso,
}


def select_delegate(dimension: int, budget: int):
    """Return (delegate name, rule description)."""
    if budget < 2 * dimension:
        return "random", f"budget {budget} < 2*dim {2 * dimension}"
    if dimension <= 10 and budget <= 100:
        return "cmaes", f"dim {dimension} <= 10 and budget {budget} <= 100"
    return "pso", f"dim {dimension} > 10 or budget {budget} > 100"


def run_ngopt(objective, space, budget: BudgetPolicy = BudgetPolicy(), seed: int = 0,
              clock=time.perf_counter) -> OptimizationResult:
    name, rule = select_delegate(space.dim, budget.max_trials)
    result = _DELEGATES[name](objective, space, budget, seed, clock=clock)
    result.algorithm = f"ngopt→{name}"
    result.selection = rule
    return result
