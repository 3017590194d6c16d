"""Operator command line: ingest, sample, split, evaluate, bench, serve."""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import graph as graph_store
from .cf import DEFAULT_K, RatingMatrixView
from .errors import GraphRecError
from .evaluation import (
    SplitConfig,
    bench_latency,
    compare_algorithms,
    format_report,
    request_functions,
    sample_requests,
    split,
)
from .movielens import RatingMode, SampleSpec, build_graph, load_movielens, sample_dataset, write_movielens

log = logging.getLogger("graphrec")

# Default movie sample size for evaluate and ingest.
DEFAULT_SAMPLE_MOVIES = 1032


def _setup_logging() -> None:
    level = os.environ.get("GRAPHREC_LOG", "WARNING").upper()
    logging.basicConfig(
        level=getattr(logging, level, logging.WARNING),
        format="%(asctime)s %(levelname)s %(name)s %(message)s",
        stream=sys.stderr,
    )


def _graph_from_args(args) -> graph_store.Graph:
    if getattr(args, "graph", None):
        return graph_store.load(args.graph)
    if not getattr(args, "data", None):
        raise GraphRecError("one of --graph or --data is required")
    raw = load_movielens(args.data)
    if args.n_movies:
        raw = sample_dataset(raw, SampleSpec(args.n_movies, args.seed))
    return build_graph(raw, RatingMode(args.mode))


def cmd_ingest(args) -> int:
    g = _graph_from_args(args)
    graph_store.save(g, args.out)
    print(f"wrote {args.out}: {g.node_count} nodes, {g.edge_count} edges, {g.interaction_count} interactions")
    return 0


def cmd_sample(args) -> int:
    raw = sample_dataset(load_movielens(args.data), SampleSpec(args.n_movies, args.seed))
    if args.out:
        write_movielens(raw, args.out)
    print("\t".join(f"{k}={v}" for k, v in raw.counts().items()))
    return 0


def cmd_split(args) -> int:
    g = _graph_from_args(args)
    train, test = split(g, SplitConfig(args.train_fraction, args.seed))
    graph_store.save(train, args.out_train)
    with open(args.out_test, "w", encoding="utf-8", newline="\n") as f:
        f.write("person\tmovie\tweight\n")
        for case in test:
            f.write(f"{case.person}\t{case.movie}\t{case.weight!r}\n")
    print(f"train={train.interaction_count} test={len(test)}")
    return 0


def cmd_evaluate(args) -> int:
    g = _graph_from_args(args)
    train, test = split(g, SplitConfig(args.train_fraction, args.seed))
    reports = compare_algorithms(train, test, args.k)
    text = format_report(reports)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    sys.stdout.write(text)
    for name, r in reports.items():
        log.info(
            json.dumps(
                {"event": "metrics", "algorithm": name, "mae": r.mae, "rmse": r.rmse,
                 "mpe_percent": r.mpe, "n_predictions": r.n_predictions, "n_undefined": r.n_undefined,
                 "mae_defined_only": r.mae_defined},
                sort_keys=True,
            )
        )
    return 0


def cmd_bench(args) -> int:
    g = _graph_from_args(args)
    view = RatingMatrixView.from_graph(g)
    pairs = sample_requests(g, args.requests, args.seed)
    request = request_functions(g, view, args.k)[args.predictor]
    report = bench_latency(request, pairs)
    print(report.line(args.predictor))
    return 0 if report.aborted is None else 1


def cmd_serve(args) -> int:
    import uvicorn

    from .service import PredictorName, RecommenderState, ServiceConfig, create_app

    host, _, port = args.listen.rpartition(":")
    config = ServiceConfig(args.graph, args.listen, PredictorName(args.predictor), args.k)
    app = create_app(RecommenderState(graph_store.load(args.graph), config))
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="graphrec", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def source(p):
        p.add_argument("--data", help="MovieLens directory (ratings.csv, movies.csv, tags.csv)")
        p.add_argument("--graph", help="graph TSV file produced by ingest")
        p.add_argument("--mode", choices=[m.value for m in RatingMode], default="linear")
        p.add_argument("--seed", type=int, default=42)
        p.add_argument(
            "--n-movies", type=int, default=DEFAULT_SAMPLE_MOVIES,
            help="movies to sample from --data (0 keeps all)",
        )

    p = sub.add_parser("ingest", help="build a graph from MovieLens and save it")
    source(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("sample", help="write a seeded movie sample of a MovieLens directory")
    p.add_argument("--data", required=True)
    p.add_argument("--n-movies", type=int, default=DEFAULT_SAMPLE_MOVIES)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--out")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("split", help="hold out test ratings")
    source(p)
    p.add_argument("--train-fraction", type=float, default=0.7)
    p.add_argument("--out-train", required=True)
    p.add_argument("--out-test", required=True)
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("evaluate", help="compare knn, pearson and sam_hybrid on a hold-out split")
    source(p)
    p.add_argument("--train-fraction", type=float, default=0.7)
    p.add_argument("--k", type=int, default=DEFAULT_K)
    p.add_argument("--out", help="also write the TSV report here")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("bench", help="mean latency of single-prediction requests")
    source(p)
    p.add_argument("--predictor", choices=["sam", "pearson", "knn"], default="sam")
    p.add_argument("--requests", type=int, default=1000)
    p.add_argument("--k", type=int, default=DEFAULT_K)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("serve", help="serve recommendations over HTTP")
    p.add_argument("--graph", required=True)
    p.add_argument("--predictor", choices=["sam", "pearson", "knn"], default="sam")
    p.add_argument("--k", type=int, default=DEFAULT_K)
    p.add_argument("--listen", default="127.0.0.1:8000")
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    _setup_logging()
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (GraphRecError, OSError) as exc:
        print(f"graphrec {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
