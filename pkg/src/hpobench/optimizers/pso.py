"""Global-best particle swarm with constriction-equivalent coefficients."""
import time

import numpy as np

from .base import BudgetExhausted, BudgetPolicy, OptimizationResult, Tracker

SWARM_SIZE = 10
INERTIA = 0.729
C_COGNITIVE = 1.49445
C_SOCIAL = 1.49445
V_INIT = 0.1


def pso_step(x, v, pbest, gbest, r1, r2, w=INERTIA, c1=C_COGNITIVE, c2=C_SOCIAL):
    """One velocity/position update; positions are clamped to the unit cube."""
    v_new = w * v + c1 * r1 * (pbest - x) + c2 * r2 * (gbest - x)
    x_new = np.clip(x + v_new, 0.0, 1.0)
    return x_new, v_new


def run_pso(objective, space, budget: BudgetPolicy = BudgetPolicy(), seed: int = 0,
            clock=time.perf_counter) -> OptimizationResult:
    if budget.max_trials < SWARM_SIZE:
        raise ValueError(f"budget must cover one swarm evaluation ({SWARM_SIZE})")
    rng = np.random.default_rng(seed)
    d = space.dim
    x = np.array([space.sample_unit(rng) for _ in range(SWARM_SIZE)])
    v = rng.uniform(-V_INIT, V_INIT, size=(SWARM_SIZE, d))
    pbest = x.copy()
    pbest_f = np.full(SWARM_SIZE, np.inf)
    gbest = x[0].copy()
    gbest_f = np.inf
    tracker = Tracker(objective, space, budget, clock=clock)
    try:
        while True:
            for i in range(SWARM_SIZE):
                f = tracker.evaluate(x[i])
                if f < pbest_f[i]:
                    pbest_f[i] = f
                    pbest[i] = x[i]
            i_best = int(np.argmin(pbest_f))
            if pbest_f[i_best] < gbest_f:
                gbest_f = pbest_f[i_best]
                gbest = pbest[i_best].copy()
            r1 = rng.random((SWARM_SIZE, d))
            r2 = rng.random((SWARM_SIZE, d))
            x, v = pso_step(x, v, pbest, gbest, r1, r2)
    except BudgetExhausted:
        pass
    return tracker.result("pso")
