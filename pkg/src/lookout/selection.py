"""Budgeted pair-plot selection maximizing total maximum anomaly score.

The objective ``f(S) = sum_i max_{j in S} s[i, j]`` is non-negative,
monotone and submodular, so greedy selection is within ``1 - 1/e`` of the
best size-``b`` set.
"""

from __future__ import annotations

import heapq
import warnings
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from ._rng import SplitMix64
from .scoring import ScoreMatrix


def _matrix(scores) -> np.ndarray:
    return scores.scores if isinstance(scores, ScoreMatrix) else np.asarray(scores, float)


def _check_plots(S: Iterable[int], l: int) -> list[int]:
    plots = [int(j) for j in S]
    for j in plots:
        if not 0 <= j < l:
            raise IndexError(f"plot index {j} out of range [0, {l})")
    return plots


def objective(scores, S: Iterable[int]) -> float:
    s = _matrix(scores)
    plots = _check_plots(S, s.shape[1])
    if not plots:
        return 0.0
    return float(s[:, plots].max(axis=1).sum())


def best_scores(scores, S: Iterable[int]) -> np.ndarray:
    """Per-anomaly maximum over ``S`` (zeros for the empty set)."""
    s = _matrix(scores)
    plots = _check_plots(S, s.shape[1])
    if not plots:
        return np.zeros(s.shape[0])
    return s[:, plots].max(axis=1)


def marginal_gain(scores, p: int, S: Iterable[int]) -> float:
    s = _matrix(scores)
    plots = _check_plots(S, s.shape[1])
    (p,) = _check_plots([p], s.shape[1])
    if p in plots:
        raise ValueError(f"plot {p} is already selected")
    return _gain(s[:, p], best_scores(s, plots))


def _gain(column: np.ndarray, best: np.ndarray) -> float:
    return float(np.maximum(column - best, 0.0).sum())


@dataclass
class PlotSelection:
    """Selected plots in pick order, with owned anomalies per plot.

    ``owners`` maps plot index to the anomaly positions (rows of the score
    matrix) that get their maximum score from that plot.
    """

    selected: list[int]
    objective: float
    budget: int
    owners: dict[int, list[int]] = field(default_factory=dict)
    gains: list[float] = field(default_factory=list)
    evaluations: int = 0


def _effective_budget(b: int, l: int) -> int:
    if b < 1:
        raise ValueError("budget must be at least 1")
    if b > l:
        warnings.warn(f"budget {b} exceeds the {l} available plots; using {l}", stacklevel=3)
    return min(b, l)


def greedy_select(scores, b: int, seed: int = 0) -> PlotSelection:
    """Lazy greedy selection.

    A max-queue holds stale gains, which upper-bound current gains by
    submodularity.  The popped plot's gain is refreshed; it is accepted if
    it still ranks at or above the queue top, otherwise reinserted.  Ties
    go to the lower plot index, making the result identical to plain
    greedy.  ``seed`` drives the random tie-break when assigning owners.
    """
    s = _matrix(scores)
    k, l = s.shape
    b = _effective_budget(b, l)
    best = np.zeros(k)
    queue = [(-_gain(s[:, j], best), j) for j in range(l)]
    heapq.heapify(queue)
    selected, gains = [], []
    evaluations = l
    while len(selected) < b:
        _, j = heapq.heappop(queue)
        gain = _gain(s[:, j], best)
        evaluations += 1
        if not queue or (-gain, j) <= queue[0]:
            selected.append(j)
            gains.append(gain)
            np.maximum(best, s[:, j], out=best)
        else:
            heapq.heappush(queue, (-gain, j))
    owners = partition_owners(s, selected, seed)
    return PlotSelection(selected, float(best.sum()), b, owners, gains, evaluations)


def plain_greedy(scores, b: int) -> list[int]:
    """Non-lazy greedy: full argmax over all remaining gains each round."""
    s = _matrix(scores)
    k, l = s.shape
    b = min(b, l)
    best = np.zeros(k)
    chosen: list[int] = []
    for _ in range(b):
        top, top_gain = -1, -1.0
        for j in range(l):
            if j in chosen:
                continue
            g = _gain(s[:, j], best)
            if g > top_gain:
                top, top_gain = j, g
        chosen.append(top)
        np.maximum(best, s[:, top], out=best)
    return chosen


def partition_owners(scores, S: Iterable[int], seed: int = 0) -> dict[int, list[int]]:
    """Assign each anomaly to the plot in ``S`` giving its maximum score.

    Exact ties are broken uniformly at random with a SplitMix64 stream
    seeded by ``seed``; the stream advances only on ties.
    """
    s = _matrix(scores)
    plots = _check_plots(S, s.shape[1])
    if not plots:
        raise ValueError("cannot partition anomalies over an empty plot set")
    rng = SplitMix64(seed)
    owners: dict[int, list[int]] = {p: [] for p in plots}
    sub = s[:, plots]
    top = sub.max(axis=1)
    for i in range(s.shape[0]):
        tied = np.flatnonzero(sub[i] == top[i])
        pick = tied[0] if len(tied) == 1 else tied[rng.randbelow(len(tied))]
        owners[plots[pick]].append(i)
    return owners
