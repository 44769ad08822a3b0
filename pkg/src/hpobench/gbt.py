"""Second-order gradient-boosted regression trees (squared error, exact greedy splits).

A small XGBoost-style booster used as the model whose hyperparameters are tuned.
Trees are grown level by level; at each level every candidate feature is scanned
once in presorted order and the best split of each open node is tracked in a
single pass.  The scan order fixes tie-breaking: lowest feature index first,
then lowest threshold.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional

import numba
import numpy as np

REG_LAMBDA = 1.0
# Numerical floor on split gain; min split loss (gamma) itself is 0.
MIN_GAIN = 1e-12
# A candidate must beat the current best by this relative margin, so splits whose
# gains differ only by summation-order rounding resolve to the earliest one.
TIE_RTOL = 1e-12

# Process-wide counters: completed fit() calls and split-scan row visits.
_FIT_CALLS = 0
_WORK = 0


class FitError(ValueError):
    pass


class ShapeError(ValueError):
    pass


@dataclass(frozen=True)
class HyperParams:
    max_depth: int = 6
    learning_rate: float = 0.3
    n_estimators: int = 100
    subsample: float = 1.0
    colsample_bytree: float = 1.0
    min_child_weight: float = 1.0

    def __post_init__(self):
        if self.max_depth < 0:
            raise ValueError("max_depth must be >= 0")
        if self.n_estimators < 0:
            raise ValueError("n_estimators must be >= 0")
        if not 0.0 < self.subsample <= 1.0:
            raise ValueError("subsample must lie in (0, 1]")
        if not 0.0 < self.colsample_bytree <= 1.0:
            raise ValueError("colsample_bytree must lie in (0, 1]")
        if self.min_child_weight < 0:
            raise ValueError("min_child_weight must be >= 0")

    def as_dict(self) -> dict:
        return {
            "max_depth": self.max_depth,
            "learning_rate": self.learning_rate,
            "n_estimators": self.n_estimators,
            "subsample": self.subsample,
            "colsample_bytree": self.colsample_bytree,
            "min_child_weight": self.min_child_weight,
        }


@dataclass(frozen=True)
class Tree:
    """Flat array representation of one regression tree.

    ``feature[k] == -1`` marks node ``k`` as a leaf with weight ``value[k]``;
    otherwise rows with ``x[feature] < threshold`` go to ``left[k]``.
    Node 0 is the root.
    """

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray

    @property
    def n_nodes(self) -> int:
        return len(self.feature)

    def depth(self) -> int:
        best = 0
        stack = [(0, 0)]
        while stack:
            k, d = stack.pop()
            if self.feature[k] < 0:
                best = max(best, d)
            else:
                stack.append((int(self.left[k]), d + 1))
                stack.append((int(self.right[k]), d + 1))
        return best

    def splits(self) -> list:
        """(node, feature, threshold) for each internal node in node order."""
        return [
            (k, int(self.feature[k]), float(self.threshold[k]))
            for k in range(self.n_nodes)
            if self.feature[k] >= 0
        ]

    def to_text(self, feature_names: Optional[List[str]] = None) -> str:
        lines = []

        def walk(k: int, indent: int) -> None:
            pad = "  " * indent
            f = int(self.feature[k])
            if f < 0:
                lines.append(f"{pad}leaf={self.value[k]:.6g}")
                return
            name = feature_names[f] if feature_names else f"f{f}"
            lines.append(f"{pad}[{name} < {self.threshold[k]:.6g}]")
            walk(int(self.left[k]), indent + 1)
            walk(int(self.right[k]), indent + 1)

        walk(0, 0)
        return "\n".join(lines)


@dataclass(frozen=True)
class GbtModel:
    base_score: float
    learning_rate: float
    trees: List[Tree] = field(default_factory=list)
    n_features: int = 0

    def predict(self, X) -> np.ndarray:
        return predict(self, X)

    def dump(self, feature_names: Optional[List[str]] = None) -> str:
        parts = [f"base_score={self.base_score:.6g} learning_rate={self.learning_rate:g}"]
        for i, tree in enumerate(self.trees):
            parts.append(f"booster[{i}]:")
            parts.append(tree.to_text(feature_names))
        return "\n".join(parts)


def fit_calls() -> int:
    return _FIT_CALLS


def reset_fit_calls() -> None:
    global _FIT_CALLS
    _FIT_CALLS = 0


def work_units() -> int:
    """Rows visited by split scans so far; a deterministic proxy for fit time."""
    return _WORK


@numba.njit(cache=True)
def _grow_tree(X, sorted_vals, sorted_rows, cols, in_sample, grad,
               max_depth, min_child_weight, reg_lambda):
    """Grow one tree on the rows flagged in ``in_sample``.

    X: (m, p) dense matrix; sorted_vals/sorted_rows: (p, m) per-feature
    ascending values and the row ids they come from.  Each open node owns
    the same contiguous segment in every sampled feature's sorted list;
    splitting a node stable-partitions that segment.  Hessians are all 1,
    so a node's hessian sum is its row count and 1/(H + lambda) comes from
    a lookup table.  Returns (feature, threshold, left, right, value, work)
    where work counts row visits made by split scans.
    """
    p, m = sorted_vals.shape
    nc = cols.shape[0]
    max_nodes = 2 ** (max_depth + 1) - 1
    feature = np.full(max_nodes, -1, dtype=np.int64)
    threshold = np.zeros(max_nodes)
    left = np.full(max_nodes, -1, dtype=np.int64)
    right = np.full(max_nodes, -1, dtype=np.int64)
    value = np.zeros(max_nodes)
    G = np.zeros(max_nodes)
    start = np.zeros(max_nodes, dtype=np.int64)
    stop = np.zeros(max_nodes, dtype=np.int64)

    n = 0
    for r in range(m):
        if in_sample[r]:
            n += 1
            G[0] += grad[r]
    inv = np.empty(n + 1)
    for c in range(n + 1):
        inv[c] = 1.0 / (c + reg_lambda)

    idx = np.empty((nc, n), dtype=np.int32)
    val = np.empty((nc, n))
    for c in range(nc):
        f = cols[c]
        j = 0
        for i in range(m):
            r = sorted_rows[f, i]
            if in_sample[r]:
                idx[c, j] = r
                val[c, j] = sorted_vals[f, i]
                j += 1
    stop[0] = n
    n_nodes = 1

    go_left = np.zeros(m, dtype=np.bool_)
    buf_i = np.empty(n, dtype=np.int32)
    buf_v = np.empty(n)

    work = 0
    level_start = 0
    level_end = 1
    for depth in range(max_depth):
        next_start = n_nodes
        for k in range(level_start, level_end):
            s = start[k]
            e = stop[k]
            hk = e - s
            gk = G[k]
            if hk < 2 * min_child_weight or hk < 2:
                continue
            # split iff 0.5 * (score - parent) > MIN_GAIN
            best = gk * gk * inv[hk] + 2.0 * MIN_GAIN
            bf = -1
            bt = 0.0
            bgl = 0.0
            bhl = 0
            # children need at least min_child_weight rows each
            lo = max(1, int(np.ceil(min_child_weight)))
            hi = hk - lo
            work += hk * nc
            for c in range(nc):
                vc = val[c]
                ic = idx[c]
                gl = 0.0
                for i in range(s, s + lo):
                    gl += grad[ic[i]]
                prev = vc[s + lo - 1]
                for i in range(s + lo, s + hi + 1):
                    v = vc[i]
                    if v > prev:
                        hl = i - s
                        gr = gk - gl
                        score = gl * gl * inv[hl] + gr * gr * inv[hk - hl]
                        if score > best + TIE_RTOL * best:
                            best = score
                            bf = c
                            bt = 0.5 * (prev + v)
                            if bt <= prev:
                                bt = v
                            bgl = gl
                            bhl = hl
                    gl += grad[ic[i]]
                    prev = v
            if bf < 0:
                continue
            f = cols[bf]
            feature[k] = f
            threshold[k] = bt
            lk = n_nodes
            rk = n_nodes + 1
            left[k] = lk
            right[k] = rk
            n_nodes += 2
            G[lk] = bgl
            G[rk] = gk - bgl
            start[lk] = s
            stop[lk] = s + bhl
            start[rk] = s + bhl
            stop[rk] = e
            if depth == max_depth - 1 or max(bhl, hk - bhl) < 2 * lo:
                continue
            for i in range(s, e):
                r = idx[0, i]
                go_left[r] = X[r, f] < bt
            for c in range(nc):
                vc = val[c]
                ic = idx[c]
                a = s
                b = 0
                for i in range(s, e):
                    r = ic[i]
                    if go_left[r]:
                        ic[a] = r
                        vc[a] = vc[i]
                        a += 1
                    else:
                        buf_i[b] = r
                        buf_v[b] = vc[i]
                        b += 1
                for i in range(b):
                    ic[a + i] = buf_i[i]
                    vc[a + i] = buf_v[i]
        if n_nodes == next_start:
            break
        level_start = next_start
        level_end = n_nodes

    for k in range(n_nodes):
        if feature[k] < 0:
            value[k] = -G[k] / (stop[k] - start[k] + reg_lambda)
    return (feature[:n_nodes].copy(), threshold[:n_nodes].copy(),
            left[:n_nodes].copy(), right[:n_nodes].copy(), value[:n_nodes].copy(), work)


@numba.njit(cache=True)
def _predict_tree(X, feature, threshold, left, right, value, out, scale):
    for i in range(X.shape[0]):
        k = 0
        while feature[k] >= 0:
            if X[i, feature[k]] < threshold[k]:
                k = left[k]
            else:
                k = right[k]
        out[i] += scale * value[k]


def _check_matrix(X) -> np.ndarray:
    X = np.ascontiguousarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    if X.ndim != 2:
        raise ShapeError(f"expected a 2-D matrix, got {X.ndim} dimensions")
    return X


def fit(X, y, hp: HyperParams, seed: int = 0) -> GbtModel:
    """Fit a boosted ensemble under squared-error loss.

    Gradients are ``pred - y`` with unit hessians.  Each round draws
    ``round(subsample * m)`` rows and ``round(colsample_bytree * p)`` columns
    (at least one of each) without replacement from a generator seeded by
    ``seed``, so the model is a deterministic function of its inputs.
    """
    global _FIT_CALLS, _WORK
    X = _check_matrix(X)
    y = np.asarray(y, dtype=np.float64).ravel()
    m, p = X.shape
    if m == 0 or p == 0:
        raise FitError("cannot fit on an empty dataset")
    if len(y) != m:
        raise ShapeError(f"X has {m} rows but y has {len(y)}")
    _FIT_CALLS += 1

    base = float(np.mean(y))
    model_trees: List[Tree] = []
    if hp.n_estimators == 0:
        return GbtModel(base, hp.learning_rate, model_trees, p)

    order = np.argsort(X, axis=0, kind="stable").T.astype(np.int32)
    sorted_vals = np.take_along_axis(X, order.T, axis=0).T.copy()
    rng = np.random.default_rng(seed)
    n_rows = max(1, int(round(hp.subsample * m)))
    n_cols = max(1, int(round(hp.colsample_bytree * p)))
    pred = np.full(m, base)
    in_sample = np.ones(m, dtype=np.bool_)
    cols = np.arange(p, dtype=np.int64)

    for _ in range(hp.n_estimators):
        if n_rows < m:
            in_sample = np.zeros(m, dtype=np.bool_)
            in_sample[rng.choice(m, n_rows, replace=False)] = True
        if n_cols < p:
            cols = np.sort(rng.choice(p, n_cols, replace=False)).astype(np.int64)
        grad = pred - y
        arrays = _grow_tree(X, sorted_vals, order, cols, in_sample, grad,
                            hp.max_depth, float(hp.min_child_weight), REG_LAMBDA)
        tree = Tree(*arrays[:5])
        _WORK += int(arrays[5])
        model_trees.append(tree)
        _predict_tree(X, tree.feature, tree.threshold, tree.left, tree.right,
                      tree.value, pred, hp.learning_rate)
    return GbtModel(base, hp.learning_rate, model_trees, p)


def predict(model: GbtModel, X) -> np.ndarray:
    X = _check_matrix(X)
    if model.n_features and X.shape[1] != model.n_features:
        raise ShapeError(
            f"model was trained on {model.n_features} features, got {X.shape[1]}")
    out = np.full(X.shape[0], model.base_score)
    for tree in model.trees:
        _predict_tree(X, tree.feature, tree.threshold, tree.left, tree.right,
                      tree.value, out, model.learning_rate)
    return out
