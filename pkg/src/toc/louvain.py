"""Weighted Louvain modularity maximization.

Each level repeats local-move passes over a seeded random node order until a
pass gains less than ``min_pass_gain``, then collapses communities with
:func:`toc.graph.aggregate` and starts again on the smaller graph.
"""

from __future__ import annotations

import os
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Sequence

from .graph import Partition, WeightedGraph, aggregate, check_partition
from .metrics import modularity


@dataclass(frozen=True)
class LouvainParams:
    seed: int = 0
    min_pass_gain: float = 1e-7
    min_move_gain: float = 1e-9
    max_levels: int = 64

    def __post_init__(self):
        if self.seed < 0:
            raise ValueError("seed must be a non-negative integer")
        if self.min_pass_gain < 0 or self.min_move_gain < 0:
            raise ValueError("gain thresholds must be >= 0")
        if self.max_levels < 1:
            raise ValueError("max_levels must be >= 1")


@dataclass
class DetectionResult:
    partition: Partition
    q: float
    levels: int
    passes: list[int] = field(default_factory=list)
    level_q: list[float] = field(default_factory=list)


@dataclass
class AveragedResult:
    mean_q: float
    qs: list[float]
    best: DetectionResult
    runs: int
    results: list[DetectionResult] = field(default_factory=list, repr=False)


def _community_totals(graph: WeightedGraph, labels: Sequence[int], size: int) -> list[float]:
    tot = [0.0] * size
    for u, d in enumerate(graph.degrees):
        tot[labels[u]] += d
    return tot


def delta_q(graph: WeightedGraph, partition: Partition, node: int, target: int) -> float:
    """Modularity change from relocating ``node`` into community ``target``.

    ``target == partition.n_communities`` stands for a new, empty community.
    Moving a node to the community it already occupies returns exactly 0.
    """
    check_partition(graph, partition)
    graph._check_node(node)
    if not 0 <= target <= partition.n_communities:
        raise ValueError(f"target community {target} out of range")
    m = graph.total_weight
    if m <= 0:
        return 0.0
    labels = partition.labels
    own = labels[node]
    k_i = graph.degrees[node]
    tot = _community_totals(graph, labels, partition.n_communities + 1)
    tot[own] -= k_i
    links = {own: 0.0, target: 0.0}
    for v, w in graph.neighbors(node):
        c = labels[v]
        if c in links:
            links[c] += w

    def insert_gain(c):
        return links[c] / m - tot[c] * k_i / (2.0 * m * m)

    return insert_gain(target) - insert_gain(own)


class _LocalMover:
    """Local-move state for one level: community per node and degree totals."""

    def __init__(self, graph: WeightedGraph, labels: Sequence[int], min_move_gain: float):
        self.graph = graph
        self.comm = list(labels)
        size = max(self.comm) + 1 if self.comm else 0
        self.tot = _community_totals(graph, self.comm, max(size, graph.n_nodes))
        self.min_move_gain = min_move_gain

    def run_pass(self, order: Sequence[int]) -> tuple[float, int]:
        g = self.graph
        m = g.total_weight
        if m <= 0:
            return 0.0, 0
        two_m = 2.0 * m
        comm, tot, degrees = self.comm, self.tot, g.degrees
        threshold = self.min_move_gain
        total_gain = 0.0
        moves = 0
        for i in order:
            nbrs, wts = g.adjacency(i)
            if not nbrs:
                continue
            ci = comm[i]
            ki = degrees[i]
            links: dict[int, float] = {}
            for j, w in zip(nbrs, wts):
                cj = comm[j]
                links[cj] = links.get(cj, 0.0) + w
            tot[ci] -= ki
            # gains below are scaled by m
            stay = links.get(ci, 0.0) - tot[ci] * ki / two_m
            best_c = -1
            best = 0.0
            for c, kic in links.items():
                if c == ci:
                    continue
                gain = kic - tot[c] * ki / two_m
                if best_c < 0 or gain > best or (gain == best and c < best_c):
                    best_c, best = c, gain
            if best_c >= 0 and (best - stay) / m > threshold:
                total_gain += (best - stay) / m
                moves += 1
                ci = best_c
                comm[i] = ci
            tot[ci] += ki
        return total_gain, moves


def local_move_pass(graph: WeightedGraph, partition: Partition, order: Sequence[int],
                    min_move_gain: float = LouvainParams.min_move_gain) -> tuple[Partition, float]:
    """One sweep of greedy node moves in the given order.

    Each node joins the neighbouring community with the largest modularity
    gain (ties to the smallest label) when that gain beats ``min_move_gain``.
    """
    check_partition(graph, partition)
    if sorted(order) != list(range(graph.n_nodes)):
        raise ValueError("order must be a permutation of the graph's nodes")
    mover = _LocalMover(graph, partition.labels, min_move_gain)
    gain, _ = mover.run_pass(order)
    return Partition.from_labels(mover.comm), gain


def louvain(graph: WeightedGraph, params: LouvainParams | None = None) -> DetectionResult:
    params = params or LouvainParams()
    n = graph.n_nodes
    if n == 0:
        return DetectionResult(Partition(()), 0.0, 0)
    rng = random.Random(params.seed)
    membership = list(range(n))
    level_graph = graph
    passes: list[int] = []
    level_q: list[float] = []
    while len(passes) < params.max_levels:
        mover = _LocalMover(level_graph, range(level_graph.n_nodes), params.min_move_gain)
        order = list(range(level_graph.n_nodes))
        level_gain = 0.0
        n_pass = 0
        while True:
            rng.shuffle(order)
            gain, moves = mover.run_pass(order)
            n_pass += 1
            level_gain += gain
            if moves == 0 or gain < params.min_pass_gain:
                break
        passes.append(n_pass)
        level_part = Partition.from_labels(mover.comm)
        membership = [level_part.labels[c] for c in membership]
        level_q.append(modularity(graph, Partition(membership)))
        if level_gain < params.min_pass_gain or level_part.n_communities == level_graph.n_nodes:
            break
        level_graph = aggregate(level_graph, level_part)
    partition = Partition.from_labels(membership)
    return DetectionResult(partition, modularity(graph, partition), len(passes), passes, level_q)


def _louvain_job(args):
    graph, params = args
    return louvain(graph, params)


def resolve_workers(workers: int | None = None) -> int:
    """Worker count from the argument or ``TOC_THREADS``; 0 means one per CPU."""
    if workers is None:
        workers = int(os.environ.get("TOC_THREADS", "0") or 0)
    if workers < 0:
        raise ValueError("worker count must be >= 0")
    return workers or os.cpu_count() or 1


def run_averaged(graph: WeightedGraph, runs: int = 10, base_seed: int = 0,
                 params: LouvainParams | None = None, workers: int = 1) -> AveragedResult:
    """Run Louvain with seeds ``base_seed .. base_seed + runs - 1`` and average Q."""
    if runs < 1:
        raise ValueError("runs must be >= 1")
    params = params or LouvainParams()
    jobs = [(graph, replace(params, seed=base_seed + r)) for r in range(runs)]
    if workers > 1 and runs > 1:
        with ProcessPoolExecutor(max_workers=min(workers, runs)) as pool:
            results = list(pool.map(_louvain_job, jobs))
    else:
        results = [_louvain_job(j) for j in jobs]
    qs = [r.q for r in results]
    best = max(range(runs), key=lambda i: (qs[i], -i))
    return AveragedResult(sum(qs) / runs, qs, results[best], runs, results)
