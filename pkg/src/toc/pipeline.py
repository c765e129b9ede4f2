"""Topic-oriented and classical community detection runs, and their comparison."""

from __future__ import annotations

import io
import json
from dataclasses import asdict, dataclass, field
from typing import Iterable, Sequence

from .errors import EmptyInputError, UndefinedMetricError
from .ingest import Dataset, ObjectCatalog
from .louvain import LouvainParams, run_averaged
from .metrics import (DEFAULT_BETAS, ClusterOutcome, dominant_topic, purity, purq,
                      total_modularity)
from .projection import PROJECTION, basic_network, object_topic_clusters, topical_clusters

TOPIC_ORIENTED = "topic-oriented"
CLASSICAL = "classical"


@dataclass(frozen=True)
class PipelineParams:
    runs: int = 10
    seed: int = 42
    louvain: LouvainParams = LouvainParams()
    all_objects: bool = False
    max_raters: int | None = None
    workers: int = 1

    def __post_init__(self):
        if self.runs < 1:
            raise ValueError("runs must be >= 1")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")

    def echo(self, topics: Sequence[str]) -> dict:
        return {
            "seed": self.seed,
            "runs": self.runs,
            "topics": list(topics),
            "projection": PROJECTION,
            "all_objects": self.all_objects,
            "max_raters": self.max_raters,
            "min_pass_gain": self.louvain.min_pass_gain,
            "min_move_gain": self.louvain.min_move_gain,
            "max_levels": self.louvain.max_levels,
        }


@dataclass
class ClusterRow:
    topic: str
    n_nodes: int
    n_edges: int
    weight: float
    mean_q: float
    best_q: float
    n_communities: int
    q_runs: list[float] = field(default_factory=list)


@dataclass
class FrameworkReport:
    framework: str
    clusters: list[ClusterRow]
    total_modularity: float
    purity: float
    purity_mean: float
    weight_t: float
    total_modularity_best: float = 0.0
    params: dict = field(default_factory=dict)
    communities: dict[str, list[list[str]]] = field(default_factory=dict)

    @classmethod
    def from_dict(cls, data: dict) -> "FrameworkReport":
        data = dict(data)
        data["clusters"] = [ClusterRow(**c) for c in data.get("clusters", [])]
        return cls(**data)


@dataclass
class ComparisonRow:
    framework: str
    q: float
    purity: float
    purq: list[float | None]


@dataclass
class ComparisonTable:
    betas: list[float]
    rows: list[ComparisonRow]

    @property
    def has_undefined(self) -> bool:
        return any(v is None for r in self.rows for v in r.purq)

    @classmethod
    def from_dict(cls, data: dict) -> "ComparisonTable":
        return cls(list(data["betas"]), [ComparisonRow(**r) for r in data["rows"]])


def _check_topics(catalog: ObjectCatalog, topics: Iterable[str]) -> list[str]:
    topics = sorted(set(topics))
    object_topic_clusters(catalog, topics)
    return topics


def run_topic_oriented(dataset: Dataset, catalog: ObjectCatalog | None, topics: Iterable[str],
                       params: PipelineParams | None = None) -> FrameworkReport:
    """Detect communities inside each topical cluster and mix their modularities
    by cluster weight relative to the basic network."""
    params = params or PipelineParams()
    catalog = dataset.catalog if catalog is None else catalog
    topics = _check_topics(catalog, topics)
    clusters = topical_clusters(dataset, catalog, topics, params.max_raters)
    if not clusters:
        raise EmptyInputError("no rated objects for requested topics")
    weight_t = basic_network(dataset, catalog, topics, params.all_objects,
                             params.max_raters).total_weight

    rows, outcomes, best_outcomes, communities = [], [], [], {}
    graphs, averaged = [], []
    for cl in clusters:
        g = cl.graph
        avg = run_averaged(g, params.runs, params.seed, params.louvain, params.workers)
        best = avg.best.partition
        members = [[g.labels[u] for u in c] for c in best.communities()]
        rows.append(ClusterRow(cl.topic, g.n_nodes, g.n_edges, g.total_weight, avg.mean_q,
                               avg.best.q, best.n_communities, avg.qs))
        outcomes.append(ClusterOutcome(cl.topic, g.total_weight, avg.mean_q, best.sizes(), members))
        best_outcomes.append(ClusterOutcome(cl.topic, g.total_weight, avg.best.q))
        communities[cl.topic] = members
        graphs.append((cl.topic, g))
        averaged.append(avg)

    # a node inside cluster T carries topic T; communities of all clusters are pooled
    def pooled_purity(partitions):
        pooled = [[(topic, g.labels[u]) for u in c]
                  for (topic, g), part in zip(graphs, partitions) for c in part.communities()]
        return purity(pooled, {node: node[0] for c in pooled for node in c})

    best_purity = pooled_purity([a.best.partition for a in averaged])
    mean_purity = sum(pooled_purity([a.results[r].partition for a in averaged])
                      for r in range(params.runs)) / params.runs
    return FrameworkReport(
        framework=TOPIC_ORIENTED,
        clusters=rows,
        total_modularity=total_modularity(outcomes, weight_t),
        purity=best_purity,
        purity_mean=mean_purity,
        weight_t=weight_t,
        total_modularity_best=total_modularity(best_outcomes, weight_t),
        params=params.echo(topics),
        communities=communities,
    )


def run_classical(dataset: Dataset, catalog: ObjectCatalog | None, topics: Iterable[str],
                  params: PipelineParams | None = None) -> FrameworkReport:
    """Detect communities on the topic-blind basic network.

    Purity labels each user with the topic most of their rated objects carry.
    ``purity`` scores the best-Q run and ``purity_mean`` averages over runs.
    """
    params = params or PipelineParams()
    catalog = dataset.catalog if catalog is None else catalog
    topics = _check_topics(catalog, topics)
    g = basic_network(dataset, catalog, topics, params.all_objects, params.max_raters)
    if g.n_nodes == 0:
        raise EmptyInputError("no rated objects for requested topics")
    avg = run_averaged(g, params.runs, params.seed, params.louvain, params.workers)

    wanted = set(topics)
    rated: dict[str, list[str]] = {}
    for r in dataset.ratings:
        rated.setdefault(r.user_id, []).append(r.object_id)
    assignment = {}
    for user in g.labels:
        if any(t in wanted for o in rated[user] for t in catalog.get(o, ())):
            assignment[user] = dominant_topic(rated[user], catalog, topics)

    # with --all-objects some users may rate no topic object; they are not scored
    def score(partition):
        comms = [[g.labels[u] for u in c if g.labels[u] in assignment]
                 for c in partition.communities()]
        return purity([c for c in comms if c], assignment)

    best = avg.best.partition
    members = [[g.labels[u] for u in c] for c in best.communities()]
    label = "+".join(topics) if not params.all_objects else "all-objects"
    row = ClusterRow(label, g.n_nodes, g.n_edges, g.total_weight, avg.mean_q, avg.best.q,
                     best.n_communities, avg.qs)
    return FrameworkReport(
        framework=CLASSICAL,
        clusters=[row],
        total_modularity=avg.mean_q,
        purity=score(best),
        purity_mean=sum(score(r.partition) for r in avg.results) / avg.runs,
        weight_t=g.total_weight,
        total_modularity_best=avg.best.q,
        params=params.echo(topics),
        communities={label: members},
    )


def compare(topic_report: FrameworkReport, classical_report: FrameworkReport,
            betas: Sequence[float] = DEFAULT_BETAS) -> ComparisonTable:
    """PurQ_beta per framework; undefined cells are ``None``. Rows: classical first."""
    rows = []
    for rep in (classical_report, topic_report):
        cells = []
        for b in betas:
            try:
                cells.append(purq(rep.purity, rep.total_modularity, b))
            except UndefinedMetricError:
                cells.append(None)
        rows.append(ComparisonRow(rep.framework, rep.total_modularity, rep.purity, cells))
    return ComparisonTable([float(b) for b in betas], rows)


def beta_label(beta: float) -> str:
    return f"purq_{beta:g}"


def _fmt(x, digits=4) -> str:
    if x is None:
        return "undefined"
    return f"{float(x):.{digits}f}"


def _fmt_weight(w: float) -> str:
    return str(int(w)) if float(w).is_integer() else _fmt(w)


def _tsv(header: list[str], rows: list[list[str]]) -> bytes:
    buf = io.StringIO()
    for line in [header] + rows:
        buf.write("\t".join(line) + "\n")
    return buf.getvalue().encode("utf-8")


def emit_report(obj: FrameworkReport | ComparisonTable, fmt: str = "json") -> bytes:
    """Serialize a report or comparison table as TSV (4-decimal display) or JSON."""
    if fmt == "json":
        text = json.dumps(asdict(obj), sort_keys=True, indent=2, allow_nan=False)
        return (text + "\n").encode("utf-8")
    if fmt != "tsv":
        raise ValueError(f"unknown report format {fmt!r}; expected tsv or json")
    if isinstance(obj, ComparisonTable):
        header = ["framework", "Q", "purity"] + [beta_label(b) for b in obj.betas]
        rows = [[r.framework, _fmt(r.q), _fmt(r.purity)] + [_fmt(v) for v in r.purq]
                for r in obj.rows]
        return _tsv(header, rows)
    header = ["framework", "topic", "edges", "nodes", "weight", "mean_q", "best_q",
              "communities", "total_modularity", "purity"]
    rows = [[obj.framework, c.topic, str(c.n_edges), str(c.n_nodes),
             _fmt_weight(c.weight), _fmt(c.mean_q),
             _fmt(c.best_q), str(c.n_communities), _fmt(obj.total_modularity), _fmt(obj.purity)]
            for c in obj.clusters]
    return _tsv(header, rows)


def load_json(raw: bytes | str) -> FrameworkReport | ComparisonTable:
    data = json.loads(raw)
    if "rows" in data and "betas" in data:
        return ComparisonTable.from_dict(data)
    return FrameworkReport.from_dict(data)
