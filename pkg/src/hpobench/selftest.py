"""Fast invariant checks runnable without pytest (``hpobench selftest``)."""
from __future__ import annotations

import math
from typing import Callable, List, Tuple

import numpy as np

from . import gbt
from .data import synth_demand, fit_apply_minmax
from .features import LagConfig, chrono_split, make_supervised
from .gbt import HyperParams
from .metrics import mape, r_squared, rmse
from .objective import fold_bounds
from .optimizers import BudgetPolicy, run_random_search, select_delegate
from .space import default_space
from .stats import dunn_bonferroni, kruskal_wallis


def _hand_tree() -> Tuple[bool, str]:
    X = np.array([[1.0], [2.0], [3.0], [4.0]])
    y = np.array([0.0, 0.0, 10.0, 10.0])
    model = gbt.fit(X, y, HyperParams(max_depth=1, learning_rate=1.0, n_estimators=1))
    leaves = sorted(float(v) for f, v in zip(model.trees[0].feature, model.trees[0].value) if f < 0)
    ok = np.allclose(leaves, [-10 / 3, 10 / 3]) and model.trees[0].threshold[0] == 2.5
    return ok, f"leaves {leaves}"


def _kw_fixture() -> Tuple[bool, str]:
    rep = kruskal_wallis([[1, 2, 3], [4, 5, 6], [7, 8, 9]])
    pw = dunn_bonferroni([[1, 2, 3], [4, 5, 6], [7, 8, 9]])
    ok = (abs(rep.H - 7.2) < 1e-9 and abs(rep.p_value - 0.0273) < 1e-3
          and abs(abs(pw.z[0, 2]) - 2.683) < 1e-3 and abs(pw.p_adj[0, 2] - 0.0219) < 1e-3)
    return ok, f"H={rep.H:.4f} p={rep.p_value:.4f} z={pw.z[0, 2]:.3f}"


def _metrics() -> Tuple[bool, str]:
    a = np.array([1.0, 2.0, 3.0])
    ok = (mape(a, a) == 0.0 and r_squared(a, a) == 1.0
          and abs(r_squared(a, np.full(3, 2.0))) < 1e-15
          and abs(r_squared([1, 2, 3], [3, 2, 1]) + 3.0) < 1e-12
          and abs(mape([10, 20], [11, 18]) - 0.1) < 1e-12
          and abs(rmse([0, 0], [3, 0]) - math.sqrt(4.5)) < 1e-12)
    return ok, "mape/r2/rmse identities"


def _decode_roundtrip() -> Tuple[bool, str]:
    space = default_space()
    rng = np.random.default_rng(0)
    for _ in range(200):
        hp = space.decode(rng.random(space.dim))
        if not space.contains(hp) or space.decode(space.encode(hp)) != hp:
            return False, f"round trip failed for {hp}"
    return True, "200 random points"


def _lags_and_split() -> Tuple[bool, str]:
    frame, _ = fit_apply_minmax(synth_demand(120, seed=1))
    uni = make_supervised(frame, LagConfig(24))
    multi = make_supervised(frame, LagConfig(24, multivariate=True))
    pair = chrono_split(uni, 0.2)
    ok = (uni.X.shape == (96, 24) and multi.X.shape == (96, 24 * (1 + frame.features.shape[1]))
          and len(pair.test) == 20 and pair.train.timestamps[-1] < pair.test.timestamps[0])
    return ok, f"uni {uni.X.shape} multi {multi.X.shape}"


def _folds() -> Tuple[bool, str]:
    sizes = [hi - lo for lo, hi in fold_bounds(103)]
    return sizes == [21, 21, 21, 20, 20], str(sizes)


def _budget_law() -> Tuple[bool, str]:
    res = run_random_search(lambda hp: 1.0, default_space(), BudgetPolicy(7, 2), seed=0)
    return len(res.history) == 7, f"{len(res.history)} trials"


def _ngopt_rules() -> Tuple[bool, str]:
    got = [select_delegate(d, b)[0] for d, b in [(6, 5), (6, 50), (6, 200), (20, 50)]]
    return got == ["random", "cmaes", "pso", "pso"], str(got)


CHECKS: List[Tuple[str, Callable[[], Tuple[bool, str]]]] = [
    ("gbt hand fixture", _hand_tree),
    ("kruskal-wallis / dunn fixture", _kw_fixture),
    ("metric identities", _metrics),
    ("grid decode round trip", _decode_roundtrip),
    ("lag shapes and chronological split", _lags_and_split),
    ("5-fold bounds", _folds),
    ("random search ignores patience", _budget_law),
    ("ngopt rule table", _ngopt_rules),
]


def run_selftest(echo=print) -> bool:
    all_ok = True
    for name, check in CHECKS:
        try:
            ok, detail = check()
        except Exception as exc:  # noqa: BLE001
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        all_ok &= ok
        echo(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
    return all_ok
