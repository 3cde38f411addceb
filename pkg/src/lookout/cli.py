"""Command-line entry point: ``lookout {detect,explain,features,generate,bench}``.

Exit codes: 0 success, 1 usage error, 2 data error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import warnings
from dataclasses import asdict, dataclass
from pathlib import Path

from . import __version__
from .bench import bench_anomaly_counts, bench_sizes, loglog_slope, write_table
from .explainer import DEFAULT_BUDGET, PairPlotExplainer, detect_anomalies
from .export import build_report, write_plots, write_report
from .features import extract_features
from .metrics import budget_sweep, write_sweep
from .scoring import SCALING_MODES
from .synthetic import PLANT_TARGETS, generate_synthetic
from .tgraph import AnomalySet, read_anomalies, read_edges, write_edges

log = logging.getLogger("lookout")

EXIT_USAGE = 1
EXIT_DATA = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


@dataclass
class RunConfig:
    graph: str
    anomalies: str | None = None
    mode: str = "dictated"
    top_k: int = 10
    budget: int = DEFAULT_BUDGET
    trees: int = 100
    sample: int = 256
    seed: int = 42
    scale: str = "log1p"
    out: str = "lookout-out"
    delimiter: str = ","
    bipartite: bool = False

    def validate(self):
        if self.mode not in ("detected", "dictated"):
            raise UsageError(f"unknown mode {self.mode!r}")
        if self.mode == "dictated" and not self.anomalies:
            raise UsageError("dictated mode needs --anomalies")
        if self.mode == "detected" and self.top_k < 1:
            raise UsageError("--top-k must be at least 1")
        if self.budget < 1:
            raise UsageError("--budget must be at least 1")
        if self.trees < 1:
            raise UsageError("--trees must be at least 1")
        if self.sample < 2:
            raise UsageError("--sample must be at least 2")
        if not 0 <= self.seed < 2**64:
            raise UsageError("--seed must be an unsigned 64-bit integer")
        if len(self.delimiter) != 1:
            raise UsageError("--delimiter must be a single character")

    def report_config(self) -> dict:
        """Run settings echoed into report.json (paths reduced to file names)."""
        cfg = asdict(self)
        cfg["graph"] = Path(self.graph).name
        cfg["anomalies"] = Path(self.anomalies).name if self.anomalies else None
        del cfg["out"]
        return cfg


def _load_graph(cfg: RunConfig):
    mode = "bipartite" if cfg.bipartite else "unipartite"
    return read_edges(cfg.graph, delimiter=cfg.delimiter, mode=mode)


def _detect(cfg, graph, features):
    if cfg.top_k > graph.n:
        raise ValueError(f"--top-k {cfg.top_k} exceeds the {graph.n} nodes in the graph")
    return detect_anomalies(features, cfg.top_k, cfg.trees, cfg.sample, cfg.seed, cfg.scale)


def _write_ranking(stream, graph, anomalies: AnomalySet, scores, delimiter):
    stream.write(delimiter.join(("rank", "node", "score")) + "\n")
    for rank, node in enumerate(anomalies.members, 1):
        stream.write(f"{rank}{delimiter}{graph.node_ids[node]}{delimiter}{scores[node]:.9g}\n")


def cmd_detect(cfg: RunConfig, output=None) -> AnomalySet:
    graph = _load_graph(cfg)
    features = extract_features(graph)
    anomalies, scores = _detect(cfg, graph, features)
    if output is None:
        out = Path(cfg.out)
        out.mkdir(parents=True, exist_ok=True)
        with open(out / "anomalies.csv", "w") as fh:
            _write_ranking(fh, graph, anomalies, scores, cfg.delimiter)
        log.info("wrote %s", out / "anomalies.csv")
    else:
        _write_ranking(output, graph, anomalies, scores, cfg.delimiter)
    return anomalies


def cmd_explain(cfg: RunConfig, dump_scores=False, sweep=False) -> dict:
    graph = _load_graph(cfg)
    features = extract_features(graph)
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    if cfg.mode == "detected":
        anomalies, node_scores = _detect(cfg, graph, features)
        with open(out / "anomalies.csv", "w") as fh:
            _write_ranking(fh, graph, anomalies, node_scores, cfg.delimiter)
    else:
        anomalies = read_anomalies(cfg.anomalies, graph)
    explainer = PairPlotExplainer(cfg.budget, cfg.trees, cfg.sample, cfg.seed, cfg.scale)
    explainer.fit(features, anomalies.members)
    report = build_report(explainer.scores_, explainer.selection_, graph.node_ids,
                          cfg.report_config(), explainer.ideal_incrimination_)
    write_plots(features, explainer.scores_, explainer.selection_, out, cfg.scale)
    write_report(report, out / "report.json")
    if dump_scores:
        with open(out / "scores.csv", "w") as fh:
            explainer.scores_.to_csv(fh, graph.node_ids, cfg.delimiter)
    if sweep:
        with open(out / "sweep.csv", "w") as fh:
            write_sweep(budget_sweep(explainer.scores_), fh, cfg.delimiter)
    log.info("selected %s", ", ".join(p["name"] for p in report["plots"]))
    return report


def _config_from(args) -> RunConfig:
    cfg = RunConfig(
        graph=args.graph,
        anomalies=getattr(args, "anomalies", None),
        mode=getattr(args, "mode", "detected"),
        top_k=args.top_k,
        budget=getattr(args, "budget", DEFAULT_BUDGET),
        trees=args.trees,
        sample=args.sample,
        seed=args.seed,
        scale=args.scale,
        out=getattr(args, "out", None) or "lookout-out",
        delimiter=args.delimiter,
        bipartite=args.bipartite,
    )
    cfg.validate()
    return cfg


def _sizes(text: str) -> list[int]:
    try:
        return [int(float(x)) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad size list {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="lookout", description="Explain graph anomalies with a few pair plots.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-v", "--verbose", action="store_true", default=argparse.SUPPRESS)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def graph_args(p, out="output directory (default: lookout-out)"):
        p.add_argument("--graph", required=True, help="edge file: source,destination,timestamp[,value]")
        p.add_argument("--delimiter", default=",")
        p.add_argument("--bipartite", action="store_true", help="validate disjoint source/destination sets")
        if out:
            p.add_argument("--out", help=out)

    def forest_args(p):
        p.add_argument("--trees", type=int, default=100)
        p.add_argument("--sample", type=int, default=256)
        p.add_argument("--seed", type=int, default=42)
        p.add_argument("--scale", choices=SCALING_MODES, default="log1p")

    p = sub.add_parser("detect", parents=[common], help="rank nodes by full-space isolation forest score")
    graph_args(p, out="directory for anomalies.csv (default: print to stdout)")
    forest_args(p)
    p.add_argument("--top-k", type=int, default=10)

    p = sub.add_parser("explain", parents=[common], help="select pair plots explaining the anomalies")
    graph_args(p)
    forest_args(p)
    p.add_argument("--anomalies", help="anomaly list, one node id per line")
    p.add_argument("--mode", choices=("detected", "dictated"), default=None,
                   help="default: dictated when --anomalies is given, else detected")
    p.add_argument("--top-k", type=int, default=10)
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    p.add_argument("--dump-scores", action="store_true", help="also write scores.csv")
    p.add_argument("--sweep", action="store_true", help="also write the budget sweep sweep.csv")

    p = sub.add_parser("features", parents=[common], help="write the per-node feature table")
    graph_args(p, out=False)
    p.add_argument("--output", help="file to write (default: stdout)")

    p = sub.add_parser("generate", parents=[common], help="write a synthetic t-graph")
    p.add_argument("--nodes", type=int, required=True)
    p.add_argument("--edges", type=int, required=True)
    p.add_argument("--plant", default="", help=f"comma list of {sorted(PLANT_TARGETS)}")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", required=True)
    p.add_argument("--anomalies-output", help="write planted node ids here")
    p.add_argument("--delimiter", default=",")

    p = sub.add_parser("bench", parents=[common], help="time extraction, scoring and selection on synthetic graphs")
    p.add_argument("--sizes", type=_sizes, default=[10_000, 100_000, 1_000_000])
    p.add_argument("--anomaly-counts", type=_sizes, default=None,
                   help="instead sweep k at the first size")
    p.add_argument("--top-k", type=int, default=50)
    p.add_argument("--budget", type=int, default=5)
    p.add_argument("--repeats", type=int, default=3)
    forest_args(p)
    p.add_argument("--delimiter", default=",")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits on --help (0) and on usage errors (our parser uses 1)
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    warnings.simplefilter("default")
    try:
        if args.command == "detect":
            cmd_detect(_config_from(args), output=None if args.out else sys.stdout)
        elif args.command == "explain":
            if args.mode is None:
                args.mode = "dictated" if args.anomalies else "detected"
            report = cmd_explain(_config_from(args), args.dump_scores, args.sweep)
            print(json.dumps({"objective": report["objective"],
                              "plots": [p["name"] for p in report["plots"]]}))
        elif args.command == "features":
            if len(args.delimiter) != 1:
                raise UsageError("--delimiter must be a single character")
            graph = read_edges(args.graph, delimiter=args.delimiter,
                               mode="bipartite" if args.bipartite else "unipartite")
            features = extract_features(graph)
            if args.output:
                with open(args.output, "w") as fh:
                    features.to_csv(fh, args.delimiter)
            else:
                features.to_csv(sys.stdout, args.delimiter)
        elif args.command == "generate":
            kinds = [k.strip() for k in args.plant.split(",") if k.strip()]
            unknown = [k for k in kinds if k not in PLANT_TARGETS]
            if unknown:
                raise UsageError(f"unknown planted behavior {unknown[0]!r}")
            synth = generate_synthetic(args.nodes, args.edges, kinds, seed=args.seed)
            with open(args.output, "w", newline="") as fh:
                write_edges(synth.graph, fh, args.delimiter)
            if args.anomalies_output:
                with open(args.anomalies_output, "w") as fh:
                    for node, kind in zip(synth.planted, synth.kinds):
                        fh.write(f"# {kind}\n{synth.graph.node_ids[node]}\n")
        elif args.command == "bench":
            if args.budget < 1 or args.top_k < 1 or args.repeats < 1:
                raise UsageError("--budget, --top-k and --repeats must be positive")
            from .iforest import ForestParams

            params = ForestParams(args.trees, args.sample, args.seed)
            opts = dict(budget=args.budget, params=params, scaling=args.scale,
                        repeats=args.repeats)
            if args.anomaly_counts:
                rows = bench_anomaly_counts(args.sizes[0], args.anomaly_counts, **opts)
            else:
                rows = bench_sizes(args.sizes, top_k=args.top_k, **opts)
            write_table(rows, sys.stdout, args.delimiter)
            if len(rows) > 1 and not args.anomaly_counts:
                slope = loglog_slope([r.edges for r in rows], [r.extract_s for r in rows])
                print(f"# extraction log-log slope: {slope:.3f}", file=sys.stderr)
    except UsageError as exc:
        print(f"lookout: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, KeyError, OSError) as exc:
        print(f"lookout: error: {exc}", file=sys.stderr)
        return EXIT_DATA
    return 0


if __name__ == "__main__":
    sys.exit(main())
