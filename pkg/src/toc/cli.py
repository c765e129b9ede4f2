"""Command line entry point: ``toc ingest | project | detect | compare``.

Exit codes: 0 success, 1 input/parse error, 2 invalid parameters,
3 undefined metric.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import __version__
from .errors import EmptyInputError, IngestError, UndefinedMetricError, UnknownTopicError
from .ingest import Dataset, load_generic, parse_genre_list, parse_movielens
from .louvain import LouvainParams, resolve_workers
from .metrics import DEFAULT_BETAS
from .pipeline import (ComparisonTable, FrameworkReport, PipelineParams, compare, emit_report,
                       load_json, run_classical, run_topic_oriented)
from .projection import PROJECTION, basic_network, object_topic_clusters, topical_clusters

EXIT_INPUT, EXIT_PARAMS, EXIT_UNDEFINED = 1, 2, 3

log = logging.getLogger("toc")


class ParamError(Exception):
    pass


def _topics(text: str) -> list[str]:
    topics = [t.strip() for t in text.split(",") if t.strip()]
    if not topics:
        raise ParamError("--topics needs at least one topic")
    return topics


def _floats(text: str) -> list[float]:
    try:
        values = [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise ParamError(f"bad beta list {text!r}") from None
    if not values or any(b < 0 for b in values):
        raise ParamError("betas must be a non-empty list of non-negative numbers")
    return values


def _write(out: str | None, payload: bytes) -> None:
    if out is None or out == "-":
        sys.stdout.buffer.write(payload)
        sys.stdout.flush()
    else:
        Path(out).write_bytes(payload)


def cmd_ingest(args) -> int:
    if args.format == "movielens":
        if not args.items:
            raise ParamError("--format movielens requires --items")
        genres = parse_genre_list(args.genres) if args.genres else None
        ds = parse_movielens(args.ratings, args.items, genres,
                             provenance={"ratings": args.ratings, "items": args.items})
    else:
        if not args.catalog:
            raise ParamError("--format generic requires --catalog")
        ds = load_generic(args.ratings, args.catalog,
                          provenance={"ratings": args.ratings, "catalog": args.catalog})
    ds.save(args.out)
    log.info("%d ratings, %d users, %d objects, %d topics", len(ds.ratings), len(ds.users()),
             len(ds.catalog), len(ds.catalog.topics()))
    return 0


def cmd_project(args) -> int:
    ds = Dataset.load(args.dataset)
    topics = sorted(set(_topics(args.topics)))
    object_topic_clusters(ds.catalog, topics)
    if args.mode == "topical":
        graphs = [c.graph.to_dict(topic=c.topic, projection=PROJECTION)
                  for c in topical_clusters(ds, None, topics)]
    else:
        g = basic_network(ds, None, topics, all_objects=args.all_objects)
        graphs = [g.to_dict(topic=None, topics=topics, projection=PROJECTION)]
    _write(args.out, (json.dumps(graphs, sort_keys=True) + "\n").encode("utf-8"))
    return 0


def cmd_detect(args) -> int:
    ds = Dataset.load(args.dataset)
    try:
        params = PipelineParams(runs=args.runs, seed=args.seed, all_objects=args.all_objects,
                                louvain=LouvainParams(seed=args.seed),
                                workers=resolve_workers())
    except ValueError as exc:
        raise ParamError(str(exc)) from exc
    run = run_topic_oriented if args.mode == "topical" else run_classical
    report = run(ds, None, _topics(args.topics), params)
    _write(args.out, emit_report(report, args.format))
    return 0


def cmd_compare(args) -> int:
    reports = []
    for path in (args.topical, args.classical):
        try:
            rep = load_json(Path(path).read_bytes())
        except (json.JSONDecodeError, TypeError, KeyError) as exc:
            raise IngestError(f"{path}: not a framework report ({exc})") from exc
        if not isinstance(rep, FrameworkReport):
            raise IngestError(f"{path}: not a framework report")
        reports.append(rep)
    table: ComparisonTable = compare(reports[0], reports[1], _floats(args.beta))
    _write(args.out, emit_report(table, args.format))
    if table.has_undefined:
        log.error("some PurQ cells are undefined (Q <= -beta^2 * purity)")
        return EXIT_UNDEFINED
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="toc", description="Topic-oriented community detection "
                                "on rating networks.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("ingest", help="parse a rating dataset into dataset.json")
    s.add_argument("--format", choices=["movielens", "generic"], required=True)
    s.add_argument("--ratings", required=True, help="u.data or generic ratings CSV")
    s.add_argument("--items", help="u.item (movielens)")
    s.add_argument("--genres", help="u.genre (movielens, optional)")
    s.add_argument("--catalog", help="object,topic CSV (generic)")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_ingest)

    s = sub.add_parser("project", help="write co-rating graphs as JSON")
    s.add_argument("--dataset", required=True)
    s.add_argument("--topics", required=True)
    s.add_argument("--mode", choices=["topical", "basic"], default="topical")
    s.add_argument("--all-objects", action="store_true",
                   help="basic network over every rated object, not only the topics' objects")
    s.add_argument("--out")
    s.set_defaults(func=cmd_project)

    s = sub.add_parser("detect", help="run Louvain and write a framework report")
    s.add_argument("--dataset", required=True)
    s.add_argument("--topics", required=True)
    s.add_argument("--mode", choices=["topical", "classical"], required=True)
    s.add_argument("--runs", type=int, default=10)
    s.add_argument("--seed", type=int, default=42)
    s.add_argument("--all-objects", action="store_true")
    s.add_argument("--format", choices=["json", "tsv"], default="json")
    s.add_argument("--out")
    s.set_defaults(func=cmd_detect)

    s = sub.add_parser("compare", help="PurQ_beta table from two framework reports")
    s.add_argument("--topical", required=True)
    s.add_argument("--classical", required=True)
    s.add_argument("--beta", default=",".join(f"{b:g}" for b in DEFAULT_BETAS))
    s.add_argument("--format", choices=["tsv", "json"], default="tsv")
    s.add_argument("--out")
    s.set_defaults(func=cmd_compare)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ParamError, UnknownTopicError) as exc:
        print(f"toc: error: {exc}", file=sys.stderr)
        return EXIT_PARAMS
    except UndefinedMetricError as exc:
        print(f"toc: undefined metric: {exc}", file=sys.stderr)
        return EXIT_UNDEFINED
    except (IngestError, EmptyInputError, OSError) as exc:
        print(f"toc: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
