import numpy as np
import pytest
from hypothesis import given, strategies as st

from hpobench import gbt
from hpobench.gbt import HyperParams, ShapeError
from oracles import brute_force_tree, random_dataset


def test_hand_fixture_leaf_weights():
    X = np.array([[1.0], [2.0], [3.0], [4.0]])
    y = np.array([0.0, 0.0, 10.0, 10.0])
    model = gbt.fit(X, y, HyperParams(max_depth=1, learning_rate=1.0, n_estimators=1))
    tree = model.trees[0]
    assert tree.splits() == [(0, 0, 2.5)]
    assert model.base_score == 5.0
    # G_L = -10, H_L = 2 -> -(-10)/(2+1); mirrored on the right
    assert tree.value[tree.left[0]] == pytest.approx(-10 / 3, abs=0)
    assert tree.value[tree.right[0]] == pytest.approx(10 / 3, abs=0)
    np.testing.assert_allclose(model.predict(X), [5 / 3, 5 / 3, 25 / 3, 25 / 3], rtol=0, atol=1e-12)


@pytest.mark.parametrize("seed", range(200))
def test_first_tree_matches_brute_force(seed):
    X, y, depth, mcw = random_dataset(seed)
    model = gbt.fit(X, y, HyperParams(max_depth=depth, learning_rate=1.0, n_estimators=1,
                                      min_child_weight=mcw))
    grad = np.full(len(y), np.mean(y)) - y
    want_splits, want_leaves = brute_force_tree(X, grad, depth, mcw)
    tree = model.trees[0]
    got = {k: (f, t) for k, f, t in tree.splits()}
    assert got == want_splits
    for k, v in want_leaves.items():
        assert tree.feature[k] == -1
        assert tree.value[k] == pytest.approx(v, rel=1e-12, abs=1e-12)


def test_constant_target_gives_single_leaf():
    X = np.arange(20.0).reshape(-1, 1)
    model = gbt.fit(X, np.full(20, 3.0), HyperParams(max_depth=4, n_estimators=3))
    assert all(t.n_nodes == 1 for t in model.trees)
    np.testing.assert_allclose(model.predict(X), 3.0)


def test_zero_estimators_predicts_mean():
    X = np.arange(10.0).reshape(-1, 1)
    y = np.arange(10.0)
    model = gbt.fit(X, y, HyperParams(n_estimators=0))
    np.testing.assert_allclose(model.predict(X), 4.5)


def test_predict_rejects_wrong_width():
    model = gbt.fit(np.ones((5, 2)), np.arange(5.0), HyperParams(n_estimators=1))
    with pytest.raises(ShapeError):
        model.predict(np.ones((3, 3)))


def test_fit_rejects_mismatched_lengths():
    with pytest.raises(ShapeError):
        gbt.fit(np.ones((5, 2)), np.arange(4.0), HyperParams())


@pytest.mark.parametrize("kwargs", [
    dict(subsample=0.0), dict(subsample=1.5), dict(colsample_bytree=0.0),
    dict(max_depth=-1), dict(n_estimators=-1), dict(min_child_weight=-1),
])
def test_invalid_hyperparams(kwargs):
    with pytest.raises(ValueError):
        HyperParams(**kwargs)


def test_fit_counter_counts_calls():
    before = gbt.fit_calls()
    for _ in range(3):
        gbt.fit(np.ones((4, 1)), np.arange(4.0), HyperParams(n_estimators=1))
    assert gbt.fit_calls() - before == 3


def test_same_seed_same_model(rng):
    X = rng.random((200, 5))
    y = X @ rng.random(5) + 0.1 * rng.normal(size=200)
    hp = HyperParams(max_depth=4, n_estimators=30, subsample=0.7, colsample_bytree=0.6)
    a = gbt.fit(X, y, hp, seed=7).predict(X)
    b = gbt.fit(X, y, hp, seed=7).predict(X)
    c = gbt.fit(X, y, hp, seed=8).predict(X)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_training_loss_decreases_with_rounds(rng):
    X = rng.random((300, 3))
    y = np.sin(6 * X[:, 0]) + X[:, 1] ** 2
    losses = []
    for n in (1, 5, 25, 100):
        pred = gbt.fit(X, y, HyperParams(max_depth=3, learning_rate=0.3, n_estimators=n)).predict(X)
        losses.append(np.mean((pred - y) ** 2))
    assert all(b < a for a, b in zip(losses, losses[1:]))


@given(st.integers(0, 10_000), st.integers(1, 6))
def test_tree_depth_never_exceeds_limit(seed, depth):
    r = np.random.default_rng(seed)
    X = r.random((60, 3))
    y = r.normal(size=60)
    model = gbt.fit(X, y, HyperParams(max_depth=depth, n_estimators=2), seed=seed)
    assert all(t.depth() <= depth for t in model.trees)


@given(st.integers(0, 10_000), st.sampled_from([1.0, 3.0, 5.0, 7.0]))
def test_leaves_respect_min_child_weight(seed, mcw):
    r = np.random.default_rng(seed)
    X = r.random((80, 2))
    y = r.normal(size=80)
    model = gbt.fit(X, y, HyperParams(max_depth=5, n_estimators=1, min_child_weight=mcw))
    tree = model.trees[0]
    # route every row to its leaf and count
    counts = {}
    for x in X:
        k = 0
        while tree.feature[k] >= 0:
            k = tree.left[k] if x[tree.feature[k]] < tree.threshold[k] else tree.right[k]
        counts[k] = counts.get(k, 0) + 1
    if tree.n_nodes > 1:
        assert min(counts.values()) >= mcw


def test_dump_mentions_every_tree():
    X = np.arange(8.0).reshape(-1, 1)
    model = gbt.fit(X, X.ravel() ** 2, HyperParams(max_depth=2, n_estimators=3))
    text = model.dump(["x"])
    assert text.count("booster[") == 3
    assert "[x <" in text
