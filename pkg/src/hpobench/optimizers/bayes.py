"""Gaussian-process Bayesian optimization with expected improvement."""
import logging
import math
import time
from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_solve, cholesky
from scipy.stats import norm

from .base import BudgetExhausted, BudgetPolicy, OptimizationResult, Tracker

log = logging.getLogger(__name__)

N_INITIAL = 5
N_CANDIDATES = 1024
JITTER = 1e-6
MAX_JITTER = 1e-2
LENGTHSCALES = (0.05, 0.1, 0.2, 0.3, 0.5, 0.8, 1.2, 2.0)
SIGNAL_VARIANCES = (0.25, 0.5, 1.0, 2.0, 4.0)


def sq_exp_kernel(A: np.ndarray, B: np.ndarray, lengthscale: float, variance: float) -> np.ndarray:
    d2 = np.sum(A ** 2, 1)[:, None] + np.sum(B ** 2, 1)[None, :] - 2 * A @ B.T
    return variance * np.exp(-0.5 * np.maximum(d2, 0.0) / lengthscale ** 2)


def expected_improvement(mu, sigma, f_best):
    """EI for minimization; zero-variance points score ``max(f_best - mu, 0)``."""
    mu = np.asarray(mu, dtype=float)
    sigma = np.asarray(sigma, dtype=float)
    improve = f_best - mu
    with np.errstate(divide="ignore", invalid="ignore"):
        z = np.where(sigma > 0, improve / np.where(sigma > 0, sigma, 1.0), 0.0)
        ei = improve * norm.cdf(z) + sigma * norm.pdf(z)
    return np.where(sigma > 0, ei, np.maximum(improve, 0.0))


@dataclass
class GPFit:
    X: np.ndarray
    L: np.ndarray
    alpha: np.ndarray
    lengthscale: float
    variance: float
    log_likelihood: float

    def predict(self, Xs: np.ndarray):
        Ks = sq_exp_kernel(Xs, self.X, self.lengthscale, self.variance)
        mu = Ks @ self.alpha
        v = cho_solve((self.L, True), Ks.T)
        var = self.variance - np.sum(Ks * v.T, axis=1)
        return mu, np.sqrt(np.maximum(var, 0.0))


class GPFitError(RuntimeError):
    pass


def fit_gp(X: np.ndarray, y: np.ndarray, jitter: float = JITTER) -> GPFit:
    """Zero-mean GP; lengthscale and signal variance maximize the marginal likelihood over a grid.

    Jitter grows tenfold (up to ``MAX_JITTER``) whenever a Gram matrix is not
    positive definite; :class:`GPFitError` is raised if none factorizes.
    """
    n = len(y)
    best = None
    for ls in LENGTHSCALES:
        for var in SIGNAL_VARIANCES:
            K = sq_exp_kernel(X, X, ls, var)
            jit = jitter
            while True:
                try:
                    L = cholesky(K + jit * np.eye(n), lower=True)
                    break
                except np.linalg.LinAlgError:
                    jit *= 10
                    if jit > MAX_JITTER * (1 + 1e-9):
                        L = None
                        break
            if L is None:
                continue
            alpha = cho_solve((L, True), y)
            ll = -0.5 * y @ alpha - np.sum(np.log(np.diag(L))) - 0.5 * n * math.log(2 * math.pi)
            if best is None or ll > best.log_likelihood:
                best = GPFit(X, L, alpha, ls, var, ll)
    if best is None:
        raise GPFitError("no Gram matrix could be factorized")
    return best


def _standardize(values: np.ndarray) -> np.ndarray:
    finite = np.isfinite(values)
    v = values.copy()
    if not finite.any():
        return np.zeros_like(v)
    v[~finite] = v[finite].max()
    sd = v.std()
    return (v - v.mean()) / (sd if sd > 0 else 1.0)


def propose(points: np.ndarray, values: np.ndarray, space, rng: np.random.Generator) -> np.ndarray:
    """Next unit point: the EI-best of ``N_CANDIDATES`` random, grid-snapped candidates."""
    y = _standardize(np.asarray(values, dtype=float))
    cand = np.array([space.snap(c) for c in rng.random((N_CANDIDATES, space.dim))])
    try:
        gp = fit_gp(np.asarray(points), y)
    except GPFitError:
        log.warning("GP fit failed; falling back to a uniform sample")
        return space.sample_unit(rng)
    mu, sigma = gp.predict(cand)
    ei = expected_improvement(mu, sigma, y.min())
    return cand[int(np.argmax(ei))]


def run_bayesian(objective, space, budget: BudgetPolicy = BudgetPolicy(), seed: int = 0,
                 clock=time.perf_counter) -> OptimizationResult:
    if budget.max_trials < N_INITIAL + 1:
        raise ValueError(f"budget must be at least {N_INITIAL + 1}")
    rng = np.random.default_rng(seed)
    tracker = Tracker(objective, space, budget, clock=clock)
    values = []
    points = []
    try:
        for _ in range(N_INITIAL):
            u = space.sample_unit(rng)
            values.append(tracker.evaluate(u))
            points.append(space.snap(u))
        while True:
            u = propose(np.array(points), np.array(values), space, rng)
            values.append(tracker.evaluate(u))
            points.append(space.snap(u))
    except BudgetExhausted:
        pass
    return tracker.result("bayes")
