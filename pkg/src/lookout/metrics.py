"""Explanation quality: incrimination, the column-sum baseline, budget sweeps."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .selection import PlotSelection, _effective_budget, _matrix, greedy_select, objective, partition_owners


@dataclass(frozen=True)
class IncriminationReport:
    budget: int
    objective: float
    incrimination: float
    ideal: float


def incrimination(scores, S: Iterable[int]) -> float:
    """Average maximum blame per anomaly, ``f(S) / k``."""
    s = _matrix(scores)
    if s.shape[0] < 1:
        raise ValueError("incrimination needs at least one anomaly")
    return objective(s, S) / s.shape[0]


def ideal_incrimination(scores) -> float:
    s = _matrix(scores)
    return incrimination(s, range(s.shape[1]))


def naive_select(scores, b: int, seed: int = 0) -> PlotSelection:
    """Top-``b`` plots by column sum (ties to the lower index)."""
    s = _matrix(scores)
    b = _effective_budget(b, s.shape[1])
    sums = s.sum(axis=0)
    order = sorted(range(s.shape[1]), key=lambda j: (-sums[j], j))[:b]
    return PlotSelection(order, objective(s, order), b, partition_owners(s, order, seed))


def report(scores, selection: PlotSelection) -> IncriminationReport:
    s = _matrix(scores)
    k = s.shape[0]
    return IncriminationReport(
        selection.budget, selection.objective, selection.objective / k, ideal_incrimination(s)
    )


def budget_sweep(scores, budgets: Iterable[int] | None = None, method: str = "greedy"):
    """Incrimination per budget for the greedy or naive selector."""
    s = _matrix(scores)
    if budgets is None:
        budgets = range(1, s.shape[1] + 1)
    select = {"greedy": greedy_select, "naive": naive_select}[method]
    return [report(s, select(s, b)) for b in budgets]


def write_sweep(rows, stream, delimiter: str = ",") -> None:
    stream.write(delimiter.join(("budget", "objective", "incrimination", "ideal")) + "\n")
    for r in rows:
        stream.write(delimiter.join(
            (str(r.budget), f"{r.objective:.9g}", f"{r.incrimination:.9g}", f"{r.ideal:.9g}")
        ) + "\n")
