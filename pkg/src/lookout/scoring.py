"""Score anomalies in every 2-d feature-pair space."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from itertools import combinations
from typing import Literal, NamedTuple, Sequence

import numpy as np
from sklearn.base import clone

from ._rng import derive_seed
from .iforest import ForestParams, IsolationForest

ScalingMode = Literal["log1p", "none"]
SCALING_MODES = ("log1p", "none")


class PairPlotId(NamedTuple):
    index: int
    feature_x: int
    feature_y: int

    def name(self, feature_names: Sequence[str]) -> str:
        return f"{feature_names[self.feature_x]}|{feature_names[self.feature_y]}"


def enumerate_pairs(d: int) -> list[PairPlotId]:
    """All ``d*(d-1)/2`` column pairs ``x < y`` in lexicographic order."""
    if d < 2:
        raise ValueError("need at least two features to form a pair")
    return [PairPlotId(j, x, y) for j, (x, y) in enumerate(combinations(range(d), 2))]


def scale(values: np.ndarray, mode: ScalingMode = "log1p") -> np.ndarray:
    if mode == "log1p":
        return np.log1p(values)
    if mode == "none":
        return np.asarray(values, dtype=np.float64)
    raise ValueError(f"unknown scaling mode {mode!r}; expected one of {SCALING_MODES}")


def worker_count(n_jobs: int | None = None) -> int:
    """Resolve ``n_jobs``; ``None`` defers to ``LOOKOUT_THREADS`` (default 1)."""
    if n_jobs is None:
        env = os.environ.get("LOOKOUT_THREADS", "").strip()
        n_jobs = int(env) if env else 1
    if n_jobs == -1:
        n_jobs = os.cpu_count() or 1
    return max(1, n_jobs)


@dataclass(frozen=True, eq=False)
class ScoreMatrix:
    """``scores[i, j]`` is the anomaly score of anomaly ``i`` in plot ``j``."""

    scores: np.ndarray
    anomalies: tuple[int, ...]
    pairs: tuple[PairPlotId, ...]
    feature_names: tuple[str, ...] = ()

    def __post_init__(self):
        scores = np.asarray(self.scores, dtype=np.float64)
        if scores.ndim != 2:
            raise ValueError("score matrix must be 2-d")
        if scores.shape != (len(self.anomalies), len(self.pairs)):
            raise ValueError(
                f"score matrix shape {scores.shape} does not match "
                f"{len(self.anomalies)} anomalies x {len(self.pairs)} plots"
            )
        if scores.size and not (np.all(scores >= 0) and np.all(scores <= 1)):
            raise ValueError("scores must lie in [0, 1]")
        scores.setflags(write=False)
        object.__setattr__(self, "scores", scores)

    @property
    def k(self) -> int:
        return self.scores.shape[0]

    @property
    def l(self) -> int:  # noqa: E743
        return self.scores.shape[1]

    @classmethod
    def from_array(cls, scores) -> "ScoreMatrix":
        """Wrap a bare ``k x l`` array; plots get synthetic pair labels."""
        scores = np.asarray(scores, dtype=np.float64)
        k, l = scores.shape
        pairs = tuple(PairPlotId(j, j, j + 1) for j in range(l))
        return cls(scores, tuple(range(k)), pairs)

    def plot_name(self, j: int) -> str:
        if self.feature_names:
            return self.pairs[j].name(self.feature_names)
        return f"P{j + 1}"

    def to_csv(self, stream, node_ids: Sequence[str] | None = None, delimiter=",") -> None:
        stream.write(delimiter.join(["anomaly"] + [self.plot_name(j) for j in range(self.l)]))
        stream.write("\n")
        for a, row in zip(self.anomalies, self.scores.tolist()):
            label = node_ids[a] if node_ids is not None else str(a)
            stream.write(delimiter.join([label] + [repr(x) for x in row]) + "\n")


def score_pair(values: np.ndarray, anomalies: Sequence[int], pair: PairPlotId,
               detector, seed: int) -> np.ndarray:
    """Fit ``detector`` on all rows of one pair space and score the anomalies."""
    X = values[:, [pair.feature_x, pair.feature_y]]
    est = clone(detector)
    if "seed" in est.get_params():
        est.set_params(seed=derive_seed(seed, pair.index))
    est.fit(X)
    return np.asarray(est.score_samples(X[list(anomalies)]), dtype=np.float64)


def score_anomalies(
    features,
    anomalies,
    params: ForestParams = ForestParams(),
    scaling: ScalingMode = "log1p",
    detector=None,
    n_jobs: int | None = None,
) -> ScoreMatrix:
    """Build the ``k x l`` score matrix.

    ``features`` is a :class:`~lookout.features.FeatureMatrix` or a bare
    ``n x d`` array; ``anomalies`` an AnomalySet or a sequence of row
    indices.  ``detector`` may be any estimator with ``fit`` and
    ``score_samples`` returning scores in [0, 1]; by default an
    :class:`IsolationForest` configured from ``params``.  Plot ``j`` is
    fitted with seed ``derive_seed(params.seed, j)``.
    """
    names = tuple(getattr(features, "feature_names", ()))
    values = np.asarray(getattr(features, "values", features), dtype=np.float64)
    members = tuple(getattr(anomalies, "members", anomalies))
    if values.ndim != 2:
        raise ValueError("features must be a 2-d matrix")
    n, d = values.shape
    if not members:
        raise ValueError("no anomalies to score")
    if any(not 0 <= a < n for a in members):
        raise ValueError("anomaly index out of range")
    pairs = enumerate_pairs(d)
    scaled = scale(values, scaling)
    if detector is None:
        detector = IsolationForest.from_params(params)

    def job(pair):
        return score_pair(scaled, members, pair, detector, params.seed)

    workers = worker_count(n_jobs)
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            columns = list(pool.map(job, pairs))
    else:
        columns = [job(p) for p in pairs]
    scores = np.column_stack(columns) if columns else np.empty((len(members), 0))
    return ScoreMatrix(scores, members, tuple(pairs), names)
