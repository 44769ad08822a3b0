from .base import (BudgetError, BudgetPolicy, OptimizationResult, TrialRecord, Tracker,
                   early_stop_check)
from .bayes import expected_improvement, run_bayesian
from .cmaes import run_cmaes
from .ngopt import run_ngopt, select_delegate
from .pso import pso_step, run_pso
from .random_search import run_random_search

ALGORITHMS = ("random", "cmaes", "bayes", "pso", "ngopt")

RUNNERS = {
    "random": run_random_search,
    "cmaes": run_cmaes,
    "bayes": run_bayesian,
    "pso": run_pso,
    "ngopt": run_ngopt,
}

__all__ = [
    "ALGORITHMS", "RUNNERS", "BudgetError", "BudgetPolicy", "OptimizationResult", "TrialRecord",
    "Tracker", "early_stop_check", "expected_improvement", "pso_step", "run_bayesian", "run_cmaes",
    "run_ngopt", "run_pso", "run_random_search", "select_delegate",
]
