"""SVG pair plots and the JSON explanation report."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence
from xml.sax.saxutils import escape, quoteattr

import numpy as np

from .scoring import PairPlotId, ScoreMatrix, scale

NORMAL_COLOR = "gray"
OWNED_COLOR = "red"
OTHER_COLOR = "blue"


@dataclass(frozen=True)
class PlotStyle:
    width: int = 480
    height: int = 400
    margin_left: int = 70
    margin_right: int = 20
    margin_top: int = 30
    margin_bottom: int = 60
    radius: float = 3.0
    anomaly_radius: float = 5.0
    ticks: int = 5
    scaling: str = "log1p"


def _fmt(x: float) -> str:
    return f"{x:.2f}"


def _tick_label(x: float) -> str:
    return f"{x:.3g}"


def _bounds(v: np.ndarray) -> tuple[float, float]:
    lo, hi = float(v.min()), float(v.max())
    if hi == lo:
        lo, hi = lo - 0.5, hi + 0.5
    pad = (hi - lo) * 0.05
    return lo - pad, hi + pad


def plot_filename(rank: int, pair: PairPlotId, feature_names: Sequence[str]) -> str:
    return f"plot_{rank}_{feature_names[pair.feature_x]}_{feature_names[pair.feature_y]}.svg"


def render_plot(
    features,
    anomalies: Sequence[int],
    plot: PairPlotId,
    owned: Sequence[int],
    style: PlotStyle = PlotStyle(),
    title: str | None = None,
) -> str:
    """Scatter of every node over one feature pair as an SVG 1.1 document.

    ``anomalies`` and ``owned`` hold node row indices; owned anomalies are
    drawn red and labelled, the remaining anomalies blue, all other nodes
    gray.  Layers go gray, blue, red so anomalies stay visible.
    """
    values = np.asarray(getattr(features, "values", features), dtype=np.float64)
    names = tuple(getattr(features, "feature_names", ())) or tuple(
        f"f{i}" for i in range(values.shape[1])
    )
    node_ids = tuple(getattr(features, "node_ids", ())) or tuple(
        str(i) for i in range(values.shape[0])
    )
    xs = scale(values[:, plot.feature_x], style.scaling)
    ys = scale(values[:, plot.feature_y], style.scaling)
    x0, x1 = _bounds(xs)
    y0, y1 = _bounds(ys)
    left, top = style.margin_left, style.margin_top
    pw = style.width - style.margin_left - style.margin_right
    ph = style.height - style.margin_top - style.margin_bottom

    def px(x):
        return left + (x - x0) / (x1 - x0) * pw

    def py(y):
        return top + ph - (y - y0) / (y1 - y0) * ph

    suffix = "" if style.scaling == "none" else f" ({style.scaling})"
    xname, yname = names[plot.feature_x], names[plot.feature_y]
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{style.width}" '
        f'height="{style.height}" viewBox="0 0 {style.width} {style.height}" '
        'font-family="sans-serif" font-size="11">',
        f'<rect x="0" y="0" width="{style.width}" height="{style.height}" fill="white"/>',
        f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
    ]
    if title:
        out.append(f'<text x="{style.width / 2:.2f}" y="18" text-anchor="middle" '
                   f'font-size="13">{escape(title)}</text>')
    for i in range(style.ticks + 1):
        tx = x0 + (x1 - x0) * i / style.ticks
        ty = y0 + (y1 - y0) * i / style.ticks
        X, Y = px(tx), py(ty)
        out.append(f'<line x1="{_fmt(X)}" y1="{top + ph}" x2="{_fmt(X)}" y2="{top + ph + 4}" '
                   'stroke="black"/>')
        out.append(f'<text x="{_fmt(X)}" y="{top + ph + 16}" text-anchor="middle">'
                   f'{_tick_label(tx)}</text>')
        out.append(f'<line x1="{left - 4}" y1="{_fmt(Y)}" x2="{left}" y2="{_fmt(Y)}" '
                   'stroke="black"/>')
        out.append(f'<text x="{left - 6}" y="{_fmt(Y + 4)}" text-anchor="end">'
                   f'{_tick_label(ty)}</text>')
    out.append(f'<text x="{left + pw / 2:.2f}" y="{style.height - 15}" text-anchor="middle" '
               f'font-size="12">{escape(xname + suffix)}</text>')
    cx, cy = 16, top + ph / 2
    out.append(f'<text x="{cx}" y="{cy:.2f}" text-anchor="middle" font-size="12" '
               f'transform="rotate(-90 {cx} {cy:.2f})">{escape(yname + suffix)}</text>')

    anomaly_set = set(int(a) for a in anomalies)
    owned_set = set(int(a) for a in owned)
    if not owned_set <= anomaly_set:
        raise ValueError("owned anomalies must be a subset of the anomalies")
    normal = [i for i in range(len(xs)) if i not in anomaly_set]
    others = [a for a in anomalies if a not in owned_set]
    ordered_owned = [a for a in anomalies if a in owned_set]

    out.append('<g class="normal">')
    for i in normal:
        out.append(f'<circle cx="{_fmt(px(xs[i]))}" cy="{_fmt(py(ys[i]))}" r="{style.radius}" '
                   f'fill="{NORMAL_COLOR}" fill-opacity="0.6"/>')
    out.append("</g>")
    for cls, color, group in (("other", OTHER_COLOR, others), ("owned", OWNED_COLOR, ordered_owned)):
        out.append(f'<g class="{cls}">')
        for i in group:
            X, Y = px(xs[i]), py(ys[i])
            out.append(f'<circle cx="{_fmt(X)}" cy="{_fmt(Y)}" r="{style.anomaly_radius}" '
                       f'fill="{color}" stroke="black" stroke-width="0.5">'
                       f'<title>{escape(node_ids[i])}</title></circle>')
            if color == OWNED_COLOR:
                out.append(f'<text x="{_fmt(X + 7)}" y="{_fmt(Y - 7)}" fill="{OWNED_COLOR}">'
                           f'{escape(node_ids[i])}</text>')
        out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _round_floats(obj, digits: int = 9):
    if isinstance(obj, float):
        if not math.isfinite(obj):
            raise ValueError("report values must be finite")
        return float(f"{obj:.{digits}g}")
    if isinstance(obj, (np.floating,)):
        return _round_floats(float(obj), digits)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, Mapping):
        return {str(k): _round_floats(v, digits) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round_floats(v, digits) for v in obj]
    return obj


def build_report(
    scores: ScoreMatrix,
    selection,
    node_ids: Sequence[str],
    config: Mapping | None = None,
    ideal: float | None = None,
) -> dict:
    """Report dict: selected plots, their owners and scores, metrics, config."""
    names = scores.feature_names or tuple(f"f{i}" for i in range(max(
        (max(p.feature_x, p.feature_y) for p in scores.pairs), default=0) + 1))
    k = scores.k
    plots = []
    for rank, j in enumerate(selection.selected, 1):
        pair = scores.pairs[j]
        plots.append({
            "rank": rank,
            "plot_index": j,
            "features": [names[pair.feature_x], names[pair.feature_y]],
            "name": pair.name(names),
            "gain": selection.gains[rank - 1] if selection.gains else None,
            "file": plot_filename(rank, pair, names),
            "owners": [
                {"node": node_ids[scores.anomalies[i]], "score": float(scores.scores[i, j])}
                for i in selection.owners.get(j, [])
            ],
        })
    anomalies = [
        {
            "node": node_ids[a],
            "scores": {scores.pairs[j].name(names): float(scores.scores[i, j])
                       for j in selection.selected},
        }
        for i, a in enumerate(scores.anomalies)
    ]
    if ideal is None:
        ideal = float(scores.scores.max(axis=1).sum()) / k
    return {
        "budget": selection.budget,
        "k": k,
        "objective": selection.objective,
        "incrimination": selection.objective / k,
        "ideal": ideal,
        "plots": plots,
        "anomalies": anomalies,
        "config": dict(config or {}),
    }


def dumps_report(report: Mapping) -> str:
    """Sorted-key JSON with floats rounded to 9 significant digits."""
    return json.dumps(_round_floats(report), sort_keys=True, indent=2) + "\n"


def write_report(report: Mapping, path) -> Path:
    path = Path(path)
    text = dumps_report(report)
    try:
        path.write_text(text)
    except OSError as exc:
        raise OSError(f"cannot write report to {path}: {exc.strerror or exc}") from exc
    return path


def write_plots(features, scores: ScoreMatrix, selection, out_dir, scaling: str = "log1p") -> list[Path]:
    out_dir = Path(out_dir)
    names = scores.feature_names
    style = PlotStyle(scaling=scaling)
    paths = []
    for rank, j in enumerate(selection.selected, 1):
        pair = scores.pairs[j]
        owned = [scores.anomalies[i] for i in selection.owners.get(j, [])]
        svg = render_plot(features, scores.anomalies, pair, owned, style,
                          title=f"#{rank}: {pair.name(names)}")
        path = out_dir / plot_filename(rank, pair, names)
        try:
            path.write_text(svg)
        except OSError as exc:
            raise OSError(f"cannot write plot to {path}: {exc.strerror or exc}") from exc
        paths.append(path)
    return paths
