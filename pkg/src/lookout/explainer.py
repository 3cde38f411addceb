"""Estimator front-ends: full-space detection and pair-plot explanation."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_array, check_is_fitted

from .iforest import ForestParams, IsolationForest
from .metrics import ideal_incrimination
from .scoring import SCALING_MODES, ScoreMatrix, scale, score_anomalies
from .selection import greedy_select
from .tgraph import AnomalySet

DEFAULT_BUDGET = 7


def _check_features(X, scaling):
    values = getattr(X, "values", X)
    values = check_array(values, dtype=np.float64, ensure_min_samples=1, ensure_min_features=2)
    if scaling not in SCALING_MODES:
        raise ValueError(f"unknown scaling mode {scaling!r}; expected one of {SCALING_MODES}")
    if scaling == "log1p" and (values < 0).any():
        raise ValueError("log1p scaling needs non-negative features")
    return values


def rank_nodes(X, n_trees=100, sample_size=256, seed=42, scaling="log1p"):
    """Score every node with one forest on the full (scaled) feature space.

    Returns ``(order, scores)``: node indices by decreasing score (ties by
    lower index) and the per-node scores.
    """
    values = _check_features(X, scaling)
    forest = IsolationForest(n_trees, sample_size, seed).fit(scale(values, scaling))
    scores = forest.score_samples(scale(values, scaling))
    order = np.lexsort((np.arange(len(scores)), -scores))
    return order, scores


def detect_anomalies(X, top_k, n_trees=100, sample_size=256, seed=42, scaling="log1p"):
    """Top-``top_k`` nodes by full-space isolation-forest score as an AnomalySet."""
    n = len(getattr(X, "values", X))
    if not 1 <= top_k <= n:
        raise ValueError(f"top_k must be in [1, {n}], got {top_k}")
    order, scores = rank_nodes(X, n_trees, sample_size, seed, scaling)
    return AnomalySet(tuple(int(i) for i in order[:top_k]), "detected"), scores


class PairPlotExplainer(BaseEstimator):
    """Pick ``budget`` feature-pair plots that best incriminate given anomalies.

    Every pair of feature columns is scored with an isolation forest fitted
    on all nodes, then plots are chosen by lazy greedy maximization of the
    summed per-anomaly maximum score.

    Parameters
    ----------
    budget : int, default=7
    n_trees, sample_size, seed :
        Isolation forest settings; plot ``j`` uses a seed derived from
        ``(seed, j)``.
    scaling : {"log1p", "none"}, default="log1p"
        Column transform applied before fitting.
    detector : estimator, optional
        Replacement scorer with ``fit``/``score_samples`` returning [0, 1].
    n_jobs : int, optional
        Worker threads for pair scoring; ``None`` reads ``LOOKOUT_THREADS``.

    Attributes
    ----------
    scores_ : ScoreMatrix
    selection_ : PlotSelection
    selected_pairs_ : list of PairPlotId
    objective_, incrimination_, ideal_incrimination_ : float
    """

    def __init__(self, budget=DEFAULT_BUDGET, n_trees=100, sample_size=256, seed=42,
                 scaling="log1p", detector=None, n_jobs=None):
        self.budget = budget
        self.n_trees = n_trees
        self.sample_size = sample_size
        self.seed = seed
        self.scaling = scaling
        self.detector = detector
        self.n_jobs = n_jobs

    def fit(self, X, anomalies):
        """``X``: FeatureMatrix or ``n x d`` array; ``anomalies``: row indices."""
        if self.budget < 1:
            raise ValueError("budget must be at least 1")
        _check_features(X, self.scaling)
        params = ForestParams(self.n_trees, self.sample_size, self.seed)
        features = X if hasattr(X, "feature_names") else np.asarray(X, dtype=np.float64)
        self.scores_ = score_anomalies(features, anomalies, params, self.scaling,
                                       self.detector, self.n_jobs)
        return self._select(self.scores_)

    def fit_scores(self, scores: ScoreMatrix):
        """Run only the selection step on a precomputed score matrix."""
        if not isinstance(scores, ScoreMatrix):
            scores = ScoreMatrix.from_array(check_array(scores, ensure_min_features=1))
        self.scores_ = scores
        return self._select(scores)

    def _select(self, scores):
        self.selection_ = greedy_select(scores, self.budget, self.seed)
        self.selected_pairs_ = [scores.pairs[j] for j in self.selection_.selected]
        self.objective_ = self.selection_.objective
        self.incrimination_ = self.objective_ / scores.k
        self.ideal_incrimination_ = ideal_incrimination(scores)
        return self

    def transform(self, X):
        """Project ``X`` onto the selected pairs: ``n x b x 2`` coordinates."""
        check_is_fitted(self, "selection_")
        values = check_array(getattr(X, "values", X), dtype=np.float64)
        cols = [(p.feature_x, p.feature_y) for p in self.selected_pairs_]
        return np.stack([values[:, list(c)] for c in cols], axis=1)

    @property
    def owners_(self):
        check_is_fitted(self, "selection_")
        return self.selection_.owners
