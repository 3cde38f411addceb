"""Isolation forest built on the repository's SplitMix64 stream.

Each tree ``i`` draws its subsample and all split decisions from
``SplitMix64(derive_seed(seed, i))``, so a fitted forest is a pure function
of ``(X, n_trees, sample_size, seed)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np
from sklearn.base import BaseEstimator, OutlierMixin
from sklearn.utils.validation import check_array, check_is_fitted, validate_data

from ._rng import SplitMix64, derive_seed

EULER_GAMMA = 0.5772156649


def harmonic(i: int) -> float:
    """H(1) = 1 exactly, ln(i) + gamma otherwise."""
    if i < 1:
        raise ValueError("harmonic number needs i >= 1")
    return 1.0 if i == 1 else math.log(i) + EULER_GAMMA


def average_path_length(z: int) -> float:
    """c(z): expected unsuccessful-search path length in a BST of z points."""
    if z <= 1:
        return 0.0
    return 2.0 * harmonic(z - 1) - 2.0 * (z - 1) / z


@lru_cache(maxsize=16)
def _c_table(z_max: int) -> np.ndarray:
    return np.array([average_path_length(z) for z in range(z_max + 1)])


def _path_table(sizes: np.ndarray) -> np.ndarray:
    z_max = int(sizes.max(initial=0))
    return _c_table(max(z_max, 256) if z_max <= 256 else z_max)[sizes]


@dataclass(frozen=True)
class ForestParams:
    trees: int = 100
    sample: int = 256
    seed: int = 42

    def __post_init__(self):
        if self.trees < 1:
            raise ValueError("trees must be >= 1")
        if self.sample < 2:
            raise ValueError("sample size must be >= 2")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit in an unsigned 64-bit integer")


class IsolationTree:
    """Flat array form; ``feature[i] == -1`` marks a leaf."""

    __slots__ = ("feature", "threshold", "left", "right", "size", "depth", "leaf_path")

    def __init__(self, feature, threshold, left, right, size, depth):
        self.feature = np.asarray(feature, dtype=np.int64)
        self.threshold = np.asarray(threshold, dtype=np.float64)
        self.left = np.asarray(left, dtype=np.int64)
        self.right = np.asarray(right, dtype=np.int64)
        self.size = np.asarray(size, dtype=np.int64)
        self.depth = np.asarray(depth, dtype=np.int64)
        self.leaf_path = self.depth + _path_table(self.size)

    @property
    def n_nodes(self) -> int:
        return len(self.feature)

    @property
    def leaves(self) -> np.ndarray:
        return np.flatnonzero(self.feature < 0)

    @classmethod
    def grow(cls, X: np.ndarray, height_limit: int, rng: SplitMix64) -> "IsolationTree":
        """Grow one tree on all rows of ``X`` (see :func:`grow_trees`)."""
        return grow_trees(X, np.arange(len(X))[None, :], height_limit, [rng])[0]

    def path_length(self, X: np.ndarray) -> np.ndarray:
        node = np.zeros(len(X), dtype=np.int64)
        rows = np.arange(len(X))
        while True:
            feat = self.feature[node]
            inner = feat >= 0
            if not inner.any():
                break
            idx = np.flatnonzero(inner)
            nd = node[idx]
            goes_left = X[rows[idx], feat[idx]] < self.threshold[nd]
            node[idx] = np.where(goes_left, self.left[nd], self.right[nd])
        return self.leaf_path[node]


def grow_trees(X: np.ndarray, samples: np.ndarray, height_limit: int,
               rngs: Sequence[SplitMix64]) -> list[IsolationTree]:
    """Grow one tree per row of ``samples`` (row indices into ``X``).

    Trees are grown breadth first and in lockstep, but each consumes only
    its own generator: at every depth its splittable nodes (more than one
    point, some dimension with nonzero range) are visited in node order and
    each takes two consecutive draws.  The first picks a dimension uniformly
    among the non-constant ones, the second a split value uniformly inside
    that dimension's open (min, max) interval.  Points below the split go
    left.  Growth stops at ``height_limit``.
    """
    n_trees, z = samples.shape
    cap = 2 * max(z, 1) - 1
    feature = np.full((n_trees, cap), -1, dtype=np.int64)
    threshold = np.zeros((n_trees, cap))
    left = np.full((n_trees, cap), -1, dtype=np.int64)
    right = np.full((n_trees, cap), -1, dtype=np.int64)
    size = np.zeros((n_trees, cap), dtype=np.int64)
    depth = np.zeros((n_trees, cap), dtype=np.int64)
    size[:, 0] = z
    n_nodes = np.ones(n_trees, dtype=np.int64)

    # open segments, ordered by tree then node; perm lists their rows
    perm = samples.ravel()
    seg_tree = np.arange(n_trees)
    seg_node = np.zeros(n_trees, dtype=np.int64)
    lens = np.full(n_trees, z)
    for d in range(height_limit):
        if not len(lens):
            break
        starts = np.concatenate(([0], np.cumsum(lens)[:-1]))
        sub = X[perm]
        lo = np.minimum.reduceat(sub, starts, axis=0)
        hi = np.maximum.reduceat(sub, starts, axis=0)
        varying = hi > lo
        split = (lens > 1) & varying.any(axis=1)
        if not split.any():
            break
        s_tree, s_node, s_lens = seg_tree[split], seg_node[split], lens[split]
        cand, lo, hi = varying[split], lo[split], hi[split]
        n_split = len(s_tree)
        per_tree = np.bincount(s_tree, minlength=n_trees)
        u = np.concatenate([rngs[i].uniform(2 * c) for i, c in enumerate(per_tree.tolist()) if c])

        n_cand = cand.sum(axis=1)
        pick = np.minimum((u[0::2] * n_cand).astype(np.int64), n_cand - 1)
        dim = np.argmax(np.cumsum(cand, axis=1) > pick[:, None], axis=1)
        rows = np.arange(n_split)
        a, b = lo[rows, dim], hi[rows, dim]
        value = a + u[1::2] * (b - a)
        bad = ~((a < value) & (value < b))
        if bad.any():
            value[bad] = a[bad] + (b[bad] - a[bad]) / 2.0
            # adjacent floats: splitting at b isolates the upper value
            still = bad & ~((a < value) & (value < b))
            value[still] = b[still]

        seg = np.repeat(rows, s_lens)
        member = perm[np.repeat(split, lens)]
        goes_right = X[member, dim[seg]] >= value[seg]
        perm = member[np.lexsort((goes_right, seg))]
        n_right = np.bincount(seg, weights=goes_right, minlength=n_split).astype(np.int64)

        first = np.cumsum(per_tree) - per_tree
        child = n_nodes[s_tree] + 2 * (rows - first[s_tree])
        feature[s_tree, s_node] = dim
        threshold[s_tree, s_node] = value
        left[s_tree, s_node] = child
        right[s_tree, s_node] = child + 1
        n_nodes += 2 * per_tree

        seg_tree = np.repeat(s_tree, 2)
        seg_node = np.column_stack([child, child + 1]).ravel()
        lens = np.column_stack([s_lens - n_right, n_right]).ravel()
        size[seg_tree, seg_node] = lens
        depth[seg_tree, seg_node] = d + 1

    return [
        IsolationTree(feature[i, :c], threshold[i, :c], left[i, :c], right[i, :c],
                      size[i, :c], depth[i, :c])
        for i, c in enumerate(n_nodes.tolist())
    ]


class IsolationForest(OutlierMixin, BaseEstimator):
    """Isolation forest anomaly detector.

    Parameters
    ----------
    n_trees : int, default=100
        Number of isolation trees.
    sample_size : int, default=256
        Points drawn without replacement per tree; clamped to the number of
        training points.
    seed : int, default=42
        Unsigned 64-bit seed.  Tree ``i`` uses ``derive_seed(seed, i)``.

    Attributes
    ----------
    trees_ : list of IsolationTree
    sample_size_ : int
        Effective per-tree subsample size.
    height_limit_ : int
        ``ceil(log2(sample_size_))``.

    Notes
    -----
    Unlike scikit-learn's estimator, :meth:`score_samples` returns the
    anomaly score ``2 ** (-E[h(x)] / c(sample_size_))`` itself, so higher
    means more anomalous.
    """

    def __init__(self, n_trees=100, sample_size=256, seed=42):
        self.n_trees = n_trees
        self.sample_size = sample_size
        self.seed = seed

    @classmethod
    def from_params(cls, params: ForestParams, seed: int | None = None) -> "IsolationForest":
        return cls(params.trees, params.sample, params.seed if seed is None else seed)

    def fit(self, X, y=None):
        ForestParams(self.n_trees, self.sample_size, self.seed)
        X = validate_data(self, X, dtype=np.float64, ensure_min_samples=1)
        n = X.shape[0]
        psi = min(self.sample_size, n)
        self.sample_size_ = psi
        self.height_limit_ = math.ceil(math.log2(psi)) if psi > 1 else 0
        rngs = [SplitMix64(derive_seed(self.seed, i)) for i in range(self.n_trees)]
        samples = np.array([rng.sample_indices(n, psi) for rng in rngs], dtype=np.int64)
        self.trees_ = grow_trees(X, samples, self.height_limit_, rngs)
        return self

    def mean_path_length(self, X) -> np.ndarray:
        check_is_fitted(self, "trees_")
        X = validate_data(self, X, dtype=np.float64, reset=False)
        total = np.zeros(X.shape[0])
        for tree in self.trees_:
            total += tree.path_length(X)
        return total / len(self.trees_)

    def score_samples(self, X) -> np.ndarray:
        h = self.mean_path_length(X)
        c = average_path_length(self.sample_size_)
        if c == 0.0:
            # a single training point carries no isolation information
            return np.full(len(h), 0.5)
        return np.exp2(-h / c)

    def score(self, point) -> float:
        """Anomaly score of one point."""
        point = check_array(np.atleast_2d(point), dtype=np.float64)
        if point.shape[0] != 1:
            raise ValueError("score expects a single point")
        return float(self.score_samples(point)[0])

    def predict(self, X, threshold: float = 0.5):
        """-1 for points scoring above ``threshold``, 1 otherwise."""
        return np.where(self.score_samples(X) > threshold, -1, 1)
