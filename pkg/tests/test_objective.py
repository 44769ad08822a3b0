import numpy as np
import pytest
from hypothesis import given, strategies as st

from hpobench import gbt
from hpobench.features import SplitError, SupervisedDataset
from hpobench.gbt import HyperParams
from hpobench.objective import ObjectiveSpec, eval_cv5, eval_holdout, fold_bounds


def dataset(X, y):
    return SupervisedDataset(np.asarray(X, float), np.asarray(y, float), ("x",),
                             np.arange(len(y)).astype("datetime64[h]"))


def test_fold_bounds_example():
    assert [hi - lo for lo, hi in fold_bounds(103)] == [21, 21, 21, 20, 20]


@given(st.integers(5, 5000))
def test_folds_tile_the_range(m):
    b = fold_bounds(m)
    assert b[0][0] == 0 and b[-1][1] == m
    assert all(b[i][1] == b[i + 1][0] for i in range(4))
    sizes = [hi - lo for lo, hi in b]
    assert max(sizes) - min(sizes) <= 1


def test_cv_fold_mean_fixture():
    # constant target per fold; a stump-free model predicts the training mean
    y = np.repeat([0.0, 2.0, 4.0, 6.0, 8.0], 5)
    ds = dataset(np.zeros((25, 1)), y)
    hp = HyperParams(n_estimators=0)
    # fold k mean of others = (20 - 2k)/4 ... RMSE = |2k - (20-2k)/4| = 2.5|k - 2|
    want = np.mean([2.5 * abs(k - 2) for k in range(5)])
    assert want == 3.0
    assert eval_cv5(ObjectiveSpec(ds, "cv5"), hp) == pytest.approx(want)


def test_cv_mean_of_fold_rmse_is_two(monkeypatch):
    # folds whose RMSE are 1,1,2,3,3 average to 2
    ds = dataset(np.zeros((25, 1)), np.zeros(25))
    scores = iter([1.0, 1.0, 2.0, 3.0, 3.0])
    monkeypatch.setattr("hpobench.objective.rmse", lambda a, p: next(scores))
    assert eval_cv5(ObjectiveSpec(ds, "cv5"), HyperParams(n_estimators=0)) == 2.0


def test_cv_does_five_fits_and_holdout_one():
    ds = dataset(np.arange(50.0).reshape(-1, 1), np.arange(50.0))
    hp = HyperParams(n_estimators=2)
    before = gbt.fit_calls()
    eval_cv5(ObjectiveSpec(ds, "cv5"), hp)
    assert gbt.fit_calls() - before == 5
    eval_holdout(ObjectiveSpec(ds), hp)
    assert gbt.fit_calls() - before == 6


def test_holdout_uses_last_fifth():
    y = np.r_[np.zeros(40), np.full(10, 3.0)]
    ds = dataset(np.zeros((50, 1)), y)
    assert eval_holdout(ObjectiveSpec(ds), HyperParams(n_estimators=0)) == pytest.approx(3.0)


def test_too_few_rows():
    with pytest.raises(SplitError):
        eval_cv5(ObjectiveSpec(dataset(np.zeros((24, 1)), np.zeros(24)), "cv5"), HyperParams())
    with pytest.raises(SplitError):
        eval_holdout(ObjectiveSpec(dataset(np.zeros((9, 1)), np.zeros(9))), HyperParams())


def test_unknown_mode():
    with pytest.raises(ValueError):
        ObjectiveSpec(dataset(np.zeros((30, 1)), np.zeros(30)), "loo")
