"""
NashOverlap - Command line
  detect             overlapping communities of an edge list
  eval nmi           overlapping NMI between two covers
  eval modularity    modularity of a disjoint cover
  gen planted        planted benchmark graph + ground truth
  stats closeness    correlation/histogram of an edge-closeness dump
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import List, Optional

from benchgen import PlantedParams, audit_mixing, generate_planted
from config import get_config
from errors import ConvergenceError, NashOverlapError
from evaluation import (closeness_stats, format_pearson, modularity, nmi_overlapping,
                        write_histogram_csv, write_scatter_csv)
from graph_core import (CoverFormat, Graph, compute_tie_strengths, parse_cover_file,
                        parse_edge_list, write_cover, write_edge_list)
from nash_overlap import NashOverlapDetector, parse_alpha_sweep
from phase1_engine import Phase1Config, read_closeness_csv, write_closeness_csv
from run_manifest import RunManifest

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_NOT_CONVERGED = 2


def _read_graph(path: str, weighted: bool, one_indexed: bool) -> Graph:
    with open(path, 'rb') as f:
        return parse_edge_list(f, weighted=weighted, one_indexed=one_indexed)


def _read_cover(path: str, fmt: str, graph: Optional[Graph] = None):
    with open(path, 'rb') as f:
        return parse_cover_file(f, CoverFormat(fmt), graph=graph)


def _pick(value, key: str):
    """CLI flag if given, else the configured value"""
    return value if value is not None else get_config().get(key)


def _sweep_path(out: Path, alpha: float) -> Path:
    return out.with_name(f"{out.stem}.alpha{alpha:.6g}{out.suffix}")


# ═══════════════════════════════════════════════════════════════════════════════
# COMMANDS
# ═══════════════════════════════════════════════════════════════════════════════

def cmd_detect(args: argparse.Namespace) -> int:
    config = get_config()
    threads = args.threads or config.threads()
    phase1 = Phase1Config(
        r=_pick(args.r, "phase1.r"),
        k=_pick(args.k, "phase1.k"),
        beta=_pick(args.beta, "phase1.beta"),
        epsilon=_pick(args.epsilon, "phase1.epsilon"),
        master_seed=_pick(args.seed, "run.seed"),
        max_rounds=config.get("phase1.max_rounds"),
    )
    alphas = parse_alpha_sweep(args.alpha_sweep) if args.alpha_sweep else [_pick(args.alpha, "phase2.alpha")]

    manifest = RunManifest(command="detect")
    manifest.parameters.update({
        "r": phase1.r, "k": phase1.k, "beta": phase1.beta, "epsilon": phase1.epsilon,
        "seed": phase1.master_seed, "phase1.max_rounds": phase1.max_rounds,
        "phase2.max_rounds": config.get("phase2.max_rounds"), "alpha": alphas,
        "weighted": args.weighted, "one_indexed": args.one_indexed,
    })
    manifest.record_input("graph", Path(args.graph))

    with manifest.stage("parse"):
        graph = _read_graph(args.graph, args.weighted, args.one_indexed)
    detector = NashOverlapDetector(phase1, phase2_max_rounds=config.get("phase2.max_rounds"),
                                   threads=threads, manifest=manifest)
    results = detector.sweep(graph, alphas)

    truth = None
    if args.truth:
        manifest.record_input("truth", Path(args.truth))
        truth = _read_cover(args.truth, args.truth_format, graph)

    out = Path(args.out)
    best = None
    for result in results:
        path = _sweep_path(out, result.alpha) if args.alpha_sweep else out
        with open(path, 'w', encoding='utf-8') as f:
            write_cover(result.cover, f, labels=graph.labels)
        manifest.record_output(path.name, path)
        summary = f"alpha={result.alpha:.6g} communities={len(result.cover)} -> {path}"
        if truth is not None:
            score = nmi_overlapping(result.cover, truth, range(graph.n)).value
            summary += f" nmi={score:.6f}"
            if best is None or score > best[1]:
                best = (result.alpha, score)
        print(summary)
    if best is not None and len(results) > 1:
        print(f"best alpha={best[0]:.6g} nmi={best[1]:.6f}")

    phase1_outcome = results[0].phase1
    if args.emit_closeness:
        with open(args.emit_closeness, 'w', encoding='utf-8') as f:
            write_closeness_csv(graph, phase1_outcome.ties, phase1_outcome.closeness, f)
        manifest.record_output("closeness", Path(args.emit_closeness))

    if args.manifest:
        manifest.write(Path(args.manifest))
    else:
        sys.stderr.write(manifest.to_text())

    if not all(result.converged for result in results):
        raise ConvergenceError("a game reached its max_rounds cap; see the manifest convergence counts")
    return EXIT_OK


def cmd_eval(args: argparse.Namespace) -> int:
    if args.metric == "nmi":
        detected = _read_cover(args.detected, args.format)
        truth = _read_cover(args.truth, args.format)
        if detected.vertices() != truth.vertices():
            raise NashOverlapError(
                f"covers are over different vertex sets ({len(detected.vertices())} vs "
                f"{len(truth.vertices())} vertices)")
        value = nmi_overlapping(detected, truth, detected.vertices()).value
        key = "nmi"
    else:
        graph = _read_graph(args.graph, args.weighted, args.one_indexed)
        cover = _read_cover(args.cover, args.format, graph)
        value = modularity(graph, cover)
        key = "modularity"
    print(json.dumps({key: value}) if args.json else repr(value))
    return EXIT_OK


def cmd_gen(args: argparse.Namespace) -> int:
    params = PlantedParams(
        n=args.n, n_comm=args.communities, comm_size=args.comm_size or -(-args.n // args.communities),
        mu=args.mu, on_fraction=args.on_fraction, om=args.om, avg_degree=args.avg_degree,
        seed=args.seed,
    )
    graph, truth = generate_planted(params)
    with open(args.out_graph, 'w', encoding='utf-8') as f:
        write_edge_list(graph, f)
    with open(args.out_truth, 'w', encoding='utf-8') as f:
        write_cover(truth, f, labels=graph.labels)
    print(f"n={graph.n} m={graph.m} communities={len(truth)}")
    print(audit_mixing(graph, truth).summary())
    return EXIT_OK


def cmd_stats(args: argparse.Namespace) -> int:
    graph = _read_graph(args.graph, args.weighted, args.one_indexed)
    ties = compute_tie_strengths(graph)
    with open(args.closeness, 'rb') as f:
        p = read_closeness_csv(graph, f)
    stats = closeness_stats(graph, ties, p, _pick(args.bin_width, "stats.bin_width"))
    with open(args.out_scatter, 'w', encoding='utf-8') as f:
        write_scatter_csv(stats, f)
    with open(args.out_hist, 'w', encoding='utf-8') as f:
        write_histogram_csv(stats, f)
    print(format_pearson(stats))
    return EXIT_OK


# ═══════════════════════════════════════════════════════════════════════════════
# PARSER
# ═══════════════════════════════════════════════════════════════════════════════

def _add_graph_flags(parser: argparse.ArgumentParser):
    parser.add_argument("--weighted", action="store_true", help="read a third weight column")
    parser.add_argument("--one-indexed", action="store_true", help="labels are 1..n")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nash-overlap", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--log-level", default=None, help="DEBUG, INFO, WARNING, ERROR")
    sub = parser.add_subparsers(dest="command", required=True)

    detect = sub.add_parser("detect", help="detect overlapping communities")
    detect.add_argument("--graph", required=True)
    _add_graph_flags(detect)
    detect.add_argument("--r", type=int)
    detect.add_argument("--k", type=int)
    detect.add_argument("--alpha", type=float)
    detect.add_argument("--beta", type=float)
    detect.add_argument("--epsilon", type=float)
    detect.add_argument("--seed", type=int)
    detect.add_argument("--threads", type=int)
    detect.add_argument("--out", required=True)
    detect.add_argument("--emit-closeness")
    detect.add_argument("--manifest")
    detect.add_argument("--alpha-sweep", help="lo:hi:step, one cover per alpha")
    detect.add_argument("--truth", help="ground-truth cover; scores every output by NMI")
    detect.add_argument("--truth-format", default=CoverFormat.COMMUNITY_PER_LINE.value,
                        choices=[f.value for f in CoverFormat])
    detect.set_defaults(handler=cmd_detect)

    evaluate = sub.add_parser("eval", help="score covers")
    metrics = evaluate.add_subparsers(dest="metric", required=True)
    nmi = metrics.add_parser("nmi")
    nmi.add_argument("--detected", required=True)
    nmi.add_argument("--truth", required=True)
    mod = metrics.add_parser("modularity")
    mod.add_argument("--graph", required=True)
    mod.add_argument("--cover", required=True)
    _add_graph_flags(mod)
    for p in (nmi, mod):
        p.add_argument("--format", default=CoverFormat.COMMUNITY_PER_LINE.value,
                       choices=[f.value for f in CoverFormat])
        p.add_argument("--json", action="store_true")
        p.set_defaults(handler=cmd_eval)

    gen = sub.add_parser("gen", help="generate benchmarks")
    kinds = gen.add_subparsers(dest="kind", required=True)
    planted = kinds.add_parser("planted")
    planted.add_argument("--n", type=int, required=True)
    planted.add_argument("--communities", type=int, required=True)
    planted.add_argument("--comm-size", type=int)
    planted.add_argument("--mu", type=float, required=True)
    planted.add_argument("--on-fraction", type=float, default=0.0)
    planted.add_argument("--om", type=int, default=2)
    planted.add_argument("--avg-degree", type=int, required=True)
    planted.add_argument("--seed", type=int, default=0)
    planted.add_argument("--out-graph", required=True)
    planted.add_argument("--out-truth", required=True)
    planted.set_defaults(handler=cmd_gen)

    stats = sub.add_parser("stats", help="edge-closeness analytics")
    analyses = stats.add_subparsers(dest="analysis", required=True)
    closeness = analyses.add_parser("closeness")
    closeness.add_argument("--graph", required=True)
    _add_graph_flags(closeness)
    closeness.add_argument("--closeness", required=True)
    closeness.add_argument("--out-scatter", required=True)
    closeness.add_argument("--out-hist", required=True)
    closeness.add_argument("--bin-width", type=float)
    closeness.set_defaults(handler=cmd_stats)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    get_config().setup_logging(args.log_level)
    try:
        return args.handler(args)
    except ConvergenceError as e:
        logging.error(f"{e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_NOT_CONVERGED
    except (NashOverlapError, OSError) as e:
        logging.error(f"{args.command} failed: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
