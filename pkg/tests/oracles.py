"""Independent reference implementations shared by unit and acceptance tests."""
from collections import deque
from fractions import Fraction

import numpy as np

from hpobench.gbt import MIN_GAIN, REG_LAMBDA


def brute_force_tree(X, grad, max_depth, mcw):
    """Exhaustive split search in exact rational arithmetic.

    Nodes are numbered breadth first, children appended in parent order.
    Ties go to the lowest feature, then the lowest threshold.
    """
    lam = Fraction(REG_LAMBDA)
    g = [Fraction(float(v)) for v in grad]
    m, p = X.shape

    def score(G, H):
        return G * G / (H + lam)

    splits, leaves = {}, {}
    queue = deque([(0, list(range(m)), 0)])
    next_id = 1
    while queue:
        node, rows, depth = queue.popleft()
        G = sum((g[r] for r in rows), Fraction(0))
        H = len(rows)
        best = None
        if depth < max_depth:
            for f in range(p):
                vals = sorted({X[r, f] for r in rows})
                for a, b in zip(vals, vals[1:]):
                    t = 0.5 * (a + b)
                    if t <= a:
                        t = b
                    left = [r for r in rows if X[r, f] < t]
                    right = [r for r in rows if X[r, f] >= t]
                    if len(left) < mcw or len(right) < mcw:
                        continue
                    GL = sum((g[r] for r in left), Fraction(0))
                    gain = (score(GL, len(left)) + score(G - GL, len(right)) - score(G, H)) / 2
                    if gain > Fraction(MIN_GAIN) and (best is None or gain > best[0]):
                        best = (gain, f, t, left, right)
        if best is None:
            leaves[node] = float(-G / (H + lam))
            continue
        _, f, t, left, right = best
        splits[node] = (f, t)
        queue.append((next_id, left, depth + 1))
        queue.append((next_id + 1, right, depth + 1))
        next_id += 2
    return splits, leaves


def random_dataset(seed):
    r = np.random.default_rng(seed)
    n = int(r.integers(2, 51))
    p = int(r.integers(1, 5))
    kind = seed % 3
    if kind == 0:
        X = r.random((n, p))
    elif kind == 1:
        # few distinct values: many tied thresholds
        X = r.integers(0, 4, size=(n, p)).astype(float)
    else:
        X = r.random((n, p))
        X[:, -1] = X[:, 0]  # duplicated column: identical gains, lowest index must win
    y = r.normal(size=n)
    depth = int(r.integers(1, 3))
    mcw = float(r.choice([1, 2, 3]))
    return X, y, depth, mcw


def random_groups(seed):
    """2-5 groups of 2-11 values; odd seeds use coarse integers so ties are common."""
    r = np.random.default_rng(seed)
    k = int(r.integers(2, 6))
    sizes = r.integers(2, 12, size=k)
    if seed % 2:
        return [list(r.integers(0, 6, size=n).astype(float)) for n in sizes]
    return [list(r.normal(loc=r.normal(), size=n)) for n in sizes]
