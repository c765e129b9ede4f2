"""Weighted undirected graphs and node partitions.

Graphs are built with :class:`GraphBuilder` and frozen into a
:class:`WeightedGraph`. Nodes are dense indices ``0..n-1``; the external id of
each node (user id, community id) is kept in ``WeightedGraph.labels``.

Self-loop convention: a self-loop stored with weight ``w`` adds ``w`` to
``total_weight`` and ``2 * w`` to the weighted degree of its node. This keeps
modularity invariant under community aggregation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Hashable, Iterable, Iterator, Sequence

from .errors import GraphError


class GraphBuilder:
    """Mutable accumulator for a :class:`WeightedGraph`.

    Parallel edges are merged by adding their weights. Self-loops are rejected
    unless ``allow_self_loops`` is set (only aggregation needs them).
    """

    def __init__(self, n: int = 0, labels: Sequence[Hashable] | None = None,
                 allow_self_loops: bool = False):
        if labels is not None:
            labels = tuple(labels)
            if n and n != len(labels):
                raise GraphError(f"{n} nodes but {len(labels)} labels")
            n = len(labels)
        if n < 0:
            raise GraphError("node count must be non-negative")
        self.n = n
        self.labels = labels if labels is not None else tuple(range(n))
        self.allow_self_loops = allow_self_loops
        self._adj: list[dict[int, float]] = [{} for _ in range(n)]
        self._loops = [0.0] * n
        self.total_weight = 0.0

    def _check_node(self, u: int) -> None:
        if not (isinstance(u, int) and 0 <= u < self.n):
            raise GraphError(f"node {u!r} out of range for {self.n}-node graph")

    def add_edge(self, u: int, v: int, w: float = 1.0) -> "GraphBuilder":
        self._check_node(u)
        self._check_node(v)
        if not w > 0:
            raise GraphError(f"edge weight must be positive, got {w!r}")
        if u == v:
            if not self.allow_self_loops:
                raise GraphError("self-loops are only allowed on aggregated graphs")
            self._loops[u] += w
        else:
            adj_u = self._adj[u]
            new = adj_u.get(v, 0.0) + w
            adj_u[v] = new
            self._adj[v][u] = new
        self.total_weight += w
        return self

    def build(self) -> "WeightedGraph":
        nbrs = []
        wts = []
        for adj in self._adj:
            keys = sorted(adj)
            nbrs.append(tuple(keys))
            wts.append(tuple(float(adj[k]) for k in keys))
        return WeightedGraph(self.labels, tuple(nbrs), tuple(wts), tuple(self._loops))


class WeightedGraph:
    """Immutable weighted undirected graph with sorted adjacency lists."""

    __slots__ = ("labels", "_nbrs", "_wts", "_loops", "_degrees", "_total", "_n_edges")

    def __init__(self, labels, nbrs, wts, loops):
        self.labels = tuple(labels)
        self._nbrs = nbrs
        self._wts = wts
        self._loops = loops
        self._degrees = tuple(sum(ws) + 2.0 * lp for ws, lp in zip(wts, loops))
        total = 0.0
        n_edges = 0
        for u, (ns, ws) in enumerate(zip(nbrs, wts)):
            for v, w in zip(ns, ws):
                if u < v:
                    total += w
                    n_edges += 1
        self._total = total + sum(loops)
        self._n_edges = n_edges

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int, float]],
                   labels: Sequence[Hashable] | None = None,
                   allow_self_loops: bool = False) -> "WeightedGraph":
        b = GraphBuilder(n, labels, allow_self_loops=allow_self_loops)
        for u, v, w in edges:
            b.add_edge(u, v, w)
        return b.build()

    def __len__(self) -> int:
        return len(self.labels)

    @property
    def n_nodes(self) -> int:
        return len(self.labels)

    @property
    def n_edges(self) -> int:
        """Number of distinct non-loop edges."""
        return self._n_edges

    @property
    def total_weight(self) -> float:
        return self._total

    def _check_node(self, u: int) -> None:
        if not (isinstance(u, int) and 0 <= u < len(self.labels)):
            raise GraphError(f"node {u!r} out of range for {len(self.labels)}-node graph")

    def weighted_degree(self, u: int) -> float:
        self._check_node(u)
        return self._degrees[u]

    @property
    def degrees(self) -> tuple[float, ...]:
        return self._degrees

    def self_loop(self, u: int) -> float:
        self._check_node(u)
        return self._loops[u]

    @property
    def self_loops(self) -> tuple[float, ...]:
        return self._loops

    def neighbors(self, u: int) -> Iterator[tuple[int, float]]:
        """Yield ``(neighbor, weight)`` pairs, self-loop excluded."""
        self._check_node(u)
        return zip(self._nbrs[u], self._wts[u])

    def adjacency(self, u: int) -> tuple[tuple[int, ...], tuple[float, ...]]:
        return self._nbrs[u], self._wts[u]

    def edge_weight(self, u: int, v: int) -> float:
        self._check_node(u)
        self._check_node(v)
        if u == v:
            return self._loops[u]
        for x, w in zip(self._nbrs[u], self._wts[u]):
            if x == v:
                return w
        return 0.0

    def edges(self) -> Iterator[tuple[int, int, float]]:
        """Yield each undirected edge once as ``(u, v, w)`` with ``u < v``."""
        for u, (ns, ws) in enumerate(zip(self._nbrs, self._wts)):
            for v, w in zip(ns, ws):
                if u < v:
                    yield u, v, w

    def __eq__(self, other):
        if not isinstance(other, WeightedGraph):
            return NotImplemented
        return (self.labels == other.labels and self._nbrs == other._nbrs
                and self._wts == other._wts and self._loops == other._loops)

    def __hash__(self):
        return hash((self.labels, self._nbrs, self._wts, self._loops))

    def __repr__(self):
        return (f"WeightedGraph(n_nodes={self.n_nodes}, n_edges={self.n_edges}, "
                f"total_weight={self.total_weight:g})")

    def to_dict(self, **meta) -> dict:
        """Interchange form: ``{nodes, edges: [[u, v, w], ...], meta}``, edges sorted."""
        if any(self._loops):
            raise GraphError("interchange format does not carry self-loops")
        return {
            "nodes": list(self.labels),
            "edges": [[u, v, w] for u, v, w in self.edges()],
            "meta": meta,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "WeightedGraph":
        nodes = data["nodes"]
        return cls.from_edges(len(nodes), ((int(u), int(v), float(w)) for u, v, w in data["edges"]),
                              labels=nodes)


@dataclass(frozen=True)
class Partition:
    """Community label per node; labels are contiguous ``0..C-1``."""

    labels: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(self.labels))
        if self.labels and set(self.labels) != set(range(max(self.labels) + 1)):
            raise GraphError("partition labels must be contiguous 0..C-1")

    @classmethod
    def from_labels(cls, labels: Iterable[Hashable]) -> "Partition":
        """Relabel arbitrary community keys in order of first appearance."""
        remap: dict = {}
        return cls(tuple(remap.setdefault(c, len(remap)) for c in labels))

    @classmethod
    def from_communities(cls, communities: Iterable[Iterable[int]], n: int) -> "Partition":
        labels: list[int | None] = [None] * n
        for c, members in enumerate(communities):
            for u in members:
                if labels[u] is not None:
                    raise GraphError(f"node {u} assigned twice")
                labels[u] = c
        if None in labels:
            raise GraphError("communities do not cover every node")
        return cls.from_labels(labels)

    @classmethod
    def singletons(cls, n: int) -> "Partition":
        return cls(tuple(range(n)))

    @classmethod
    def whole(cls, n: int) -> "Partition":
        return cls((0,) * n)

    def __len__(self) -> int:
        return len(self.labels)

    def __getitem__(self, u: int) -> int:
        return self.labels[u]

    @property
    def n_communities(self) -> int:
        return max(self.labels) + 1 if self.labels else 0

    def communities(self) -> list[list[int]]:
        groups: list[list[int]] = [[] for _ in range(self.n_communities)]
        for u, c in enumerate(self.labels):
            groups[c].append(u)
        return groups

    def sizes(self) -> list[int]:
        return [len(c) for c in self.communities()]


def check_partition(graph: WeightedGraph, partition: Partition) -> None:
    if len(partition) != graph.n_nodes:
        raise GraphError(
            f"partition covers {len(partition)} nodes, graph has {graph.n_nodes}")


def aggregate(graph: WeightedGraph, partition: Partition) -> WeightedGraph:
    """Collapse each community into one node.

    Crossing weights between two communities are summed into one edge; edges
    inside a community and members' self-loops become the community's self-loop.
    """
    check_partition(graph, partition)
    c = partition.labels
    b = GraphBuilder(partition.n_communities, allow_self_loops=True)
    for u, v, w in graph.edges():
        b.add_edge(c[u], c[v], w)
    for u, lp in enumerate(graph.self_loops):
        if lp > 0:
            b.add_edge(c[u], c[u], lp)
    return b.build()
