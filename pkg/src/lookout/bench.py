"""Wall-clock scaling harness over synthetic graphs."""

from __future__ import annotations

import time
from dataclasses import astuple, dataclass, fields

import numpy as np

from .features import extract_features
from .iforest import ForestParams
from .scoring import score_anomalies
from .selection import greedy_select
from .synthetic import generate_synthetic


@dataclass(frozen=True)
class BenchRow:
    edges: int
    nodes: int
    anomalies: int
    extract_s: float
    scoring_s: float
    selection_s: float

    @property
    def explain_s(self) -> float:
        return self.scoring_s + self.selection_s


def _best_of(fn, repeats):
    best, result = float("inf"), None
    for _ in range(repeats):
        t0 = time.perf_counter()
        result = fn()
        best = min(best, time.perf_counter() - t0)
    return best, result


def bench_point(m, top_k=50, budget=5, params=ForestParams(), scaling="log1p",
                seed=0, nodes_per_edge=0.1, repeats=3, n_jobs=None) -> BenchRow:
    n = max(2, int(m * nodes_per_edge))
    graph = generate_synthetic(n, m, seed=seed).graph
    extract_s, features = _best_of(lambda: extract_features(graph), repeats)
    rng = np.random.default_rng(seed)
    anomalies = rng.choice(n, size=min(top_k, n), replace=False).tolist()
    t0 = time.perf_counter()
    scores = score_anomalies(features, anomalies, params, scaling, n_jobs=n_jobs)
    scoring_s = time.perf_counter() - t0
    selection_s, _ = _best_of(lambda: greedy_select(scores, budget, params.seed), repeats)
    return BenchRow(m, n, len(anomalies), extract_s, scoring_s, selection_s)


def bench_sizes(sizes, **kwargs) -> list[BenchRow]:
    return [bench_point(int(m), **kwargs) for m in sizes]


def bench_anomaly_counts(m, counts, **kwargs) -> list[BenchRow]:
    return [bench_point(int(m), top_k=int(k), **kwargs) for k in counts]


def loglog_slope(x, y) -> float:
    """Least-squares slope of log(y) against log(x)."""
    return float(np.polyfit(np.log(x), np.log(y), 1)[0])


def write_table(rows, stream, delimiter=",") -> None:
    stream.write(delimiter.join(f.name for f in fields(BenchRow)) + "\n")
    for row in rows:
        stream.write(delimiter.join(
            str(v) if isinstance(v, int) else f"{v:.6f}" for v in astuple(row)
        ) + "\n")
