"""(mu/mu_w, lambda)-CMA-ES on the unit cube.

Standard default strategy parameters (weights, cumulation constants, damping)
with a single covariance matrix updated by rank-one and rank-mu terms.
Candidates falling outside ``[0, 1]`` are clamped and the clamped point is
used both for evaluation and for the update.
"""
import logging
import math
import time

import numpy as np

from .base import BudgetExhausted, BudgetPolicy, OptimizationResult, Tracker

log = logging.getLogger(__name__)

SIGMA0 = 0.3


class CMAESState:
    def __init__(self, dim: int, mean=None, sigma: float = SIGMA0):
        n = dim
        self.dim = n
        self.lam = 4 + int(math.floor(3 * math.log(n)))
        self.mu = self.lam // 2
        w = math.log((self.lam + 1) / 2) - np.log(np.arange(1, self.mu + 1))
        self.weights = w / w.sum()
        self.mueff = 1.0 / np.sum(self.weights ** 2)

        self.cc = (4 + self.mueff / n) / (n + 4 + 2 * self.mueff / n)
        self.cs = (self.mueff + 2) / (n + self.mueff + 5)
        self.c1 = 2 / ((n + 1.3) ** 2 + self.mueff)
        self.cmu = min(1 - self.c1,
                       2 * (self.mueff - 2 + 1 / self.mueff) / ((n + 2) ** 2 + self.mueff))
        self.damps = 1 + 2 * max(0.0, math.sqrt((self.mueff - 1) / (n + 1)) - 1) + self.cs
        self.chiN = math.sqrt(n) * (1 - 1 / (4 * n) + 1 / (21 * n * n))

        self.mean = np.full(n, 0.5) if mean is None else np.asarray(mean, dtype=float).copy()
        self.sigma = sigma
        self.C = np.eye(n)
        self.B = np.eye(n)
        self.D = np.ones(n)
        self.invsqrtC = np.eye(n)
        self.pc = np.zeros(n)
        self.ps = np.zeros(n)
        self.generation = 0
        self.resets = 0

    def ask(self, rng: np.random.Generator) -> np.ndarray:
        z = rng.standard_normal((self.lam, self.dim))
        return self.mean + self.sigma * (z * self.D) @ self.B.T

    def tell(self, X: np.ndarray, f: np.ndarray) -> None:
        n = self.dim
        order = np.argsort(f, kind="stable")[: self.mu]
        old = self.mean
        self.mean = self.weights @ X[order]
        y = (self.mean - old) / self.sigma

        self.ps = (1 - self.cs) * self.ps + math.sqrt(self.cs * (2 - self.cs) * self.mueff) * (self.invsqrtC @ y)
        self.generation += 1
        ps_norm = np.linalg.norm(self.ps)
        hsig = ps_norm / math.sqrt(1 - (1 - self.cs) ** (2 * self.generation)) / self.chiN < 1.4 + 2 / (n + 1)
        self.pc = (1 - self.cc) * self.pc + hsig * math.sqrt(self.cc * (2 - self.cc) * self.mueff) * y

        artmp = (X[order] - old) / self.sigma
        rank_mu = (artmp.T * self.weights) @ artmp
        self.C = ((1 - self.c1 - self.cmu) * self.C
                  + self.c1 * (np.outer(self.pc, self.pc)
                               + (1 - hsig) * self.cc * (2 - self.cc) * self.C)
                  + self.cmu * rank_mu)
        self.sigma *= math.exp((self.cs / self.damps) * (ps_norm / self.chiN - 1))
        self._decompose()

    def _decompose(self) -> None:
        C = np.triu(self.C) + np.triu(self.C, 1).T
        try:
            evals, B = np.linalg.eigh(C)
            ok = np.all(np.isfinite(evals)) and evals.min() > 0
        except np.linalg.LinAlgError:
            ok = False
        if not ok:
            log.warning("covariance lost positive definiteness at generation %d; reset to identity",
                        self.generation)
            self.resets += 1
            C = np.eye(self.dim)
            evals, B = np.ones(self.dim), np.eye(self.dim)
        self.C = C
        self.B = B
        self.D = np.sqrt(evals)
        self.invsqrtC = B @ np.diag(1 / self.D) @ B.T


def run_cmaes(objective, space, budget: BudgetPolicy = BudgetPolicy(), seed: int = 0,
              clock=time.perf_counter) -> OptimizationResult:
    rng = np.random.default_rng(seed)
    es = CMAESState(space.dim)
    if budget.max_trials < es.lam:
        raise ValueError(f"budget {budget.max_trials} is smaller than one generation ({es.lam})")
    tracker = Tracker(objective, space, budget, clock=clock)
    try:
        while True:
            X = np.clip(es.ask(rng), 0.0, 1.0)
            f = np.array([tracker.evaluate(x) for x in X])
            es.tell(X, f)
    except BudgetExhausted:
        pass
    return tracker.result("cmaes")
