"""Kruskal-Wallis omnibus test and Dunn pairwise comparisons with Bonferroni adjustment."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy.stats import chi2, norm


class StatsInputError(ValueError):
    pass


@dataclass(frozen=True)
class KruskalWallisReport:
    H: float
    df: int
    p_value: float
    mean_ranks: Tuple[float, ...]
    tie_correction: float
    sizes: Tuple[int, ...]


@dataclass(frozen=True)
class PairwiseMatrix:
    """Signed mean-rank differences (row minus column) with Dunn z and p values."""

    names: Tuple[str, ...]
    diff: np.ndarray
    z: np.ndarray
    p_raw: np.ndarray
    p_adj: np.ndarray
    alpha: float

    @property
    def significant(self) -> np.ndarray:
        return self.p_adj < self.alpha

    @property
    def n_comparisons(self) -> int:
        k = len(self.names)
        return k * (k - 1) // 2

    def pair(self, a, b) -> dict:
        i = self.names.index(a) if isinstance(a, str) else a
        j = self.names.index(b) if isinstance(b, str) else b
        return {
            "difference": float(self.diff[i, j]),
            "z": float(self.z[i, j]),
            "p_raw": float(self.p_raw[i, j]),
            "p_adj": float(self.p_adj[i, j]),
            "significant": bool(self.significant[i, j]),
        }

    def pairs(self):
        k = len(self.names)
        for i in range(k):
            for j in range(i + 1, k):
                yield self.names[i], self.names[j], self.pair(i, j)

    def to_text(self, digits: int = 2) -> str:
        """Full k x k difference matrix; ``*`` marks Bonferroni significance."""
        k = len(self.names)
        cells = [["" for _ in range(k)] for _ in range(k)]
        for i in range(k):
            for j in range(k):
                mark = "*" if i != j and self.significant[i, j] else ""
                cells[i][j] = f"{self.diff[i, j]:.{digits}f}{mark}"
        width = max(len(c) for row in cells for c in row)
        width = max(width, max(len(n) for n in self.names))
        label = max(len(n) for n in self.names)
        lines = [" " * label + "  " + "  ".join(f"{n:>{width}}" for n in self.names)]
        for i in range(k):
            lines.append(f"{self.names[i]:<{label}}  " + "  ".join(f"{c:>{width}}" for c in cells[i]))
        return "\n".join(lines) + "\n"


def rank_with_ties(values) -> np.ndarray:
    """Ascending ranks 1..N; tied values share the mean of the ranks they span."""
    v = np.asarray(values, dtype=float).ravel()
    if v.size == 0:
        raise StatsInputError("cannot rank an empty vector")
    order = np.argsort(v, kind="mergesort")
    sorted_v = v[order]
    ranks = np.empty(v.size)
    i = 0
    n = v.size
    while i < n:
        j = i
        while j + 1 < n and sorted_v[j + 1] == sorted_v[i]:
            j += 1
        ranks[order[i:j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return ranks


def _tie_sum(values: np.ndarray) -> float:
    _, counts = np.unique(values, return_counts=True)
    return float(np.sum(counts.astype(float) ** 3 - counts))


def _pool(groups: Sequence[Sequence[float]]):
    arrays = [np.asarray(g, dtype=float).ravel() for g in groups]
    if len(arrays) < 2:
        raise StatsInputError("need at least two groups")
    if any(a.size == 0 for a in arrays):
        raise StatsInputError("every group must be nonempty")
    pooled = np.concatenate(arrays)
    ranks = rank_with_ties(pooled)
    sizes = np.array([a.size for a in arrays])
    bounds = np.concatenate([[0], np.cumsum(sizes)])
    mean_ranks = np.array([ranks[bounds[i]:bounds[i + 1]].mean() for i in range(len(arrays))])
    return pooled, sizes, mean_ranks


def kruskal_wallis(groups: Sequence[Sequence[float]]) -> KruskalWallisReport:
    pooled, sizes, mr = _pool(groups)
    N = pooled.size
    k = len(sizes)
    ties = _tie_sum(pooled)
    correction = 1.0 - ties / (N ** 3 - N) if N > 1 else 0.0
    if correction <= 0:
        return KruskalWallisReport(0.0, k - 1, 1.0, tuple(mr), 1.0, tuple(int(s) for s in sizes))
    h_raw = 12.0 / (N * (N + 1)) * float(np.sum(sizes * mr ** 2)) - 3.0 * (N + 1)
    H = max(h_raw / correction, 0.0)
    p = float(chi2.sf(H, k - 1))
    return KruskalWallisReport(H, k - 1, min(max(p, 0.0), 1.0), tuple(mr), correction,
                               tuple(int(s) for s in sizes))


def dunn_bonferroni(groups: Sequence[Sequence[float]], alpha: float = 0.05,
                    names: Optional[Sequence[str]] = None) -> PairwiseMatrix:
    """Dunn's z for every pair, tie-adjusted, with Bonferroni-multiplied p values."""
    pooled, sizes, mr = _pool(groups)
    N = pooled.size
    k = len(sizes)
    names = tuple(names) if names is not None else tuple(f"g{i}" for i in range(k))
    if len(names) != k:
        raise StatsInputError("names must match the number of groups")
    m = k * (k - 1) // 2
    base_var = N * (N + 1) / 12.0 - _tie_sum(pooled) / (12.0 * (N - 1)) if N > 1 else 0.0

    diff = mr[:, None] - mr[None, :]
    z = np.zeros((k, k))
    p_raw = np.ones((k, k))
    for i in range(k):
        for j in range(k):
            if i == j:
                continue
            se = math.sqrt(max(base_var, 0.0) * (1.0 / sizes[i] + 1.0 / sizes[j]))
            if se > 0:
                z[i, j] = diff[i, j] / se
                p_raw[i, j] = min(1.0, 2.0 * float(norm.sf(abs(z[i, j]))))
    p_adj = np.minimum(1.0, p_raw * m)
    return PairwiseMatrix(names, diff, z, p_raw, p_adj, alpha)
