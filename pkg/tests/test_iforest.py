import math

import numpy as np
import pytest
from sklearn.base import clone

from lookout._rng import SplitMix64, derive_seed
from lookout.iforest import (
    ForestParams,
    IsolationForest,
    IsolationTree,
    average_path_length,
    harmonic,
)


def test_harmonic_and_c():
    assert harmonic(1) == 1.0
    assert harmonic(5) == pytest.approx(math.log(5) + 0.5772156649)
    assert average_path_length(1) == 0.0
    assert average_path_length(2) == 1.0
    assert average_path_length(256) == pytest.approx(2 * (math.log(255) + 0.5772156649) - 2 * 255 / 256)


def test_score_half_when_mean_path_equals_c():
    f = IsolationForest(n_trees=5, sample_size=8, seed=1).fit(np.zeros((8, 2)))
    # identical points: every tree is one leaf of size 8, path = c(8)
    assert all(t.n_nodes == 1 for t in f.trees_)
    assert f.score(np.zeros(2)) == pytest.approx(0.5, abs=1e-15)
    one = IsolationForest(n_trees=1, sample_size=8, seed=1).fit(np.zeros((8, 2)))
    assert one.score(np.zeros(2)) == 0.5


def test_single_point_forest():
    f = IsolationForest(n_trees=3, sample_size=256, seed=0).fit([[1.0, 2.0]])
    for tree in f.trees_:
        assert tree.n_nodes == 1 and tree.size.tolist() == [1]
    assert f.sample_size_ == 1
    assert 0 < f.score([1.0, 2.0]) < 1


def _same_forest(a, b):
    return all(
        np.array_equal(getattr(x, k), getattr(y, k))
        for x, y in zip(a.trees_, b.trees_)
        for k in ("feature", "threshold", "left", "right", "size")
    )


def test_determinism_and_seed_sensitivity():
    X = np.random.default_rng(0).normal(size=(300, 3))
    a = IsolationForest(20, 64, 9).fit(X)
    b = IsolationForest(20, 64, 9).fit(X)
    c = IsolationForest(20, 64, 10).fit(X)
    assert _same_forest(a, b)
    assert not _same_forest(a, c)
    assert np.array_equal(a.score_samples(X), b.score_samples(X))


def test_batched_growth_matches_single_tree():
    X = np.random.default_rng(1).normal(size=(500, 2))
    f = IsolationForest(10, 128, 5).fit(X)
    for i, tree in enumerate(f.trees_):
        rng = SplitMix64(derive_seed(5, i))
        rows = rng.sample_indices(500, 128)
        single = IsolationTree.grow(X[rows], f.height_limit_, rng)
        assert np.array_equal(single.threshold, tree.threshold)
        assert np.array_equal(single.feature, tree.feature)


def _paths(tree, node=0, depth=0):
    if tree.feature[node] < 0:
        yield depth, node
    else:
        yield from _paths(tree, tree.left[node], depth + 1)
        yield from _paths(tree, tree.right[node], depth + 1)


def test_tree_structure_invariants():
    X = np.random.default_rng(2).exponential(size=(1000, 4))
    f = IsolationForest(25, 200, 3).fit(X)
    assert f.height_limit_ == math.ceil(math.log2(200))
    assert len(f.trees_) == 25
    for tree in f.trees_:
        leaves = list(_paths(tree))
        assert max(d for d, _ in leaves) <= f.height_limit_
        assert sum(tree.size[n] for _, n in leaves) == 200
        inner = tree.feature >= 0
        assert np.all(tree.size[inner] == tree.size[tree.left[inner]] + tree.size[tree.right[inner]])


def test_splits_strictly_inside_range():
    X = np.random.default_rng(3).integers(0, 3, size=(100, 2)).astype(float)
    f = IsolationForest(50, 64, 0).fit(X)
    for tree in f.trees_:
        for node in np.flatnonzero(tree.feature >= 0):
            assert tree.size[tree.left[node]] > 0 and tree.size[tree.right[node]] > 0


def test_constant_dimension_never_split():
    X = np.column_stack([np.random.default_rng(4).normal(size=200), np.full(200, 3.0)])
    f = IsolationForest(30, 64, 0).fit(X)
    assert all(np.all(t.feature[t.feature >= 0] == 0) for t in f.trees_)


def test_scores_in_open_interval_and_monotone_in_path():
    X = np.random.default_rng(5).normal(size=(400, 2))
    f = IsolationForest(50, 128, 1).fit(X)
    s = f.score_samples(X)
    assert np.all((s > 0) & (s < 1))
    h = f.mean_path_length(X)
    order = np.argsort(h)
    assert np.all(np.diff(s[order]) <= 0)


def test_planted_outlier_ranks_above_inliers():
    rng = np.random.default_rng(11)
    X = np.vstack([rng.normal(size=(200, 2)), [[10.0, 0.0]]])
    s = IsolationForest(100, 128, 42).fit(X).score_samples(X)
    # oracle: the point farthest from the centroid
    far = np.argmax(np.linalg.norm(X - X.mean(axis=0), axis=1))
    assert far == 200 and s[200] > s[:200].max()


def test_one_dimensional_outlier():
    X = np.array([[0.0]] * 99 + [[1000.0]])
    s = IsolationForest(500, 64, 0).fit(X).score_samples(X)
    assert s[-1] > s[0]
    assert np.all(s[:-1] == s[0])


def test_dimension_mismatch_and_empty():
    f = IsolationForest(5, 16, 0).fit(np.ones((20, 2)) * np.arange(20)[:, None])
    with pytest.raises(ValueError):
        f.score_samples(np.ones((3, 3)))
    with pytest.raises(ValueError):
        IsolationForest().fit(np.empty((0, 2)))


@pytest.mark.parametrize("kwargs", [dict(n_trees=0), dict(sample_size=1), dict(seed=-1)])
def test_invalid_params(kwargs):
    with pytest.raises(ValueError):
        IsolationForest(**kwargs).fit(np.ones((5, 2)))


def test_params_dataclass_and_sklearn_protocol():
    p = ForestParams(trees=7, sample=32, seed=5)
    est = IsolationForest.from_params(p)
    assert est.get_params() == {"n_trees": 7, "sample_size": 32, "seed": 5}
    cloned = clone(est).set_params(seed=6)
    assert cloned.seed == 6 and est.seed == 5
    X = np.random.default_rng(0).normal(size=(50, 2))
    assert set(np.unique(est.fit(X).predict(X))) <= {-1, 1}
