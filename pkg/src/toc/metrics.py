"""Community quality metrics: modularity, cluster-weighted total modularity,
topic purity and the PurQ_beta combination of the two."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Mapping, Sequence

from .errors import EmptyInputError, UndefinedMetricError
from .graph import Partition, WeightedGraph, check_partition

DEFAULT_BETAS = (0.5, 0.75, 1.0, 1.5, 2.0)


@dataclass
class ClusterOutcome:
    """Community detection result on one topical cluster."""

    topic: str
    weight: float
    q: float
    community_sizes: list[int] = field(default_factory=list)
    communities: list[list[Hashable]] = field(default_factory=list)

    def __post_init__(self):
        if self.weight < 0:
            raise ValueError("cluster weight must be non-negative")


@dataclass(frozen=True)
class ComparisonParams:
    betas: tuple[float, ...] = DEFAULT_BETAS
    runs: int = 10
    seed: int = 42

    def __post_init__(self):
        if any(b < 0 for b in self.betas):
            raise ValueError("beta values must be non-negative")
        if self.runs < 1:
            raise ValueError("runs must be >= 1")


def modularity(graph: WeightedGraph, partition: Partition) -> float:
    """Weighted Newman modularity, computed per community.

    Q = sum_c [ in_c / m - (tot_c / 2m)^2 ] where ``in_c`` is the edge weight
    inside community c (self-loops included once) and ``tot_c`` its summed
    weighted degree. A graph with no edge weight has Q = 0.
    """
    check_partition(graph, partition)
    m = graph.total_weight
    if m <= 0:
        return 0.0
    labels = partition.labels
    k = partition.n_communities
    inside = [0.0] * k
    tot = [0.0] * k
    for u, v, w in graph.edges():
        if labels[u] == labels[v]:
            inside[labels[u]] += w
    for u, (deg, loop) in enumerate(zip(graph.degrees, graph.self_loops)):
        c = labels[u]
        tot[c] += deg
        inside[c] += loop
    two_m = 2.0 * m
    return sum(i / m - (t / two_m) ** 2 for i, t in zip(inside, tot))


def total_modularity(outcomes: Sequence[ClusterOutcome], weight_t: float) -> float:
    """Mix per-cluster modularities by each cluster's share of the basic network weight.

    The shares need not sum to one: overlapping users are counted in each
    cluster, while edges spanning two topics appear only in the basic network.
    """
    if not outcomes:
        return 0.0
    if weight_t <= 0:
        raise UndefinedMetricError("basic network weight is zero; total modularity undefined")
    return sum(o.weight / weight_t * o.q for o in outcomes)


def purity(communities: Iterable[Iterable[Hashable]],
           assignment: Mapping[Hashable, str]) -> float:
    """Unweighted mean over communities of the dominant topic's share."""
    shares = []
    for members in communities:
        counts = Counter()
        for node in members:
            try:
                counts[assignment[node]] += 1
            except KeyError:
                raise KeyError(f"node {node!r} has no topic assignment") from None
        n = sum(counts.values())
        if n == 0:
            raise EmptyInputError("empty community")
        shares.append(max(counts.values()) / n)
    if not shares:
        raise EmptyInputError("purity of an empty community set is undefined")
    return sum(shares) / len(shares)


def purq(purity_value: float, q: float, beta: float) -> float:
    """(1 + b^2) * P * Q / (b^2 * P + Q); raises when the denominator is not positive."""
    if beta < 0:
        raise ValueError("beta must be non-negative")
    b2 = beta * beta
    denom = b2 * purity_value + q
    if not denom > 0:
        raise UndefinedMetricError(
            f"PurQ undefined for purity={purity_value!r}, Q={q!r}, beta={beta!r}")
    return (1.0 + b2) * (purity_value * q) / denom


def dominant_topic(rated_objects: Iterable[str], catalog: Mapping[str, Iterable[str]],
                   topics: Iterable[str]) -> str:
    """Topic covering most of a user's rated objects; ties go to the smaller label.

    Objects carrying several requested topics count once for each of them.
    """
    wanted = set(topics)
    counts = Counter()
    for obj in rated_objects:
        for t in catalog.get(obj, ()):
            if t in wanted:
                counts[t] += 1
    if not counts:
        raise EmptyInputError("user has no ratings on objects of the requested topics")
    return min(counts, key=lambda t: (-counts[t], t))
