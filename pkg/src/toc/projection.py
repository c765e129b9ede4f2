"""User co-rating graphs and per-topic clusters.

Two users are linked with weight equal to the number of (filtered) objects
both of them rated. Ratings values are not used.
"""

from __future__ import annotations

import logging
from collections import defaultdict
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Mapping

from .errors import UnknownTopicError
from .graph import GraphBuilder, WeightedGraph
from .ingest import Dataset, ObjectCatalog

log = logging.getLogger(__name__)

PROJECTION = "common-objects"


def id_sort_key(x: str):
    """Numeric ids sort numerically, others lexicographically after them."""
    return (0, int(x), "") if x.isdigit() else (1, 0, x)


@dataclass
class TopicalCluster:
    topic: str
    graph: WeightedGraph
    n_objects: int

    @property
    def users(self) -> tuple:
        return self.graph.labels


def object_topic_clusters(catalog: Mapping[str, Iterable[str]],
                          topics: Iterable[str] | None = None) -> dict[str, frozenset[str]]:
    groups: dict[str, set[str]] = defaultdict(set)
    for obj, ts in catalog.items():
        for t in ts:
            groups[t].add(obj)
    if topics is None:
        wanted = sorted(groups)
    else:
        wanted = sorted(set(topics))
        missing = set(wanted) - set(groups)
        if missing:
            raise UnknownTopicError(missing, groups)
    return {t: frozenset(groups[t]) for t in wanted}


def _ratings_of(dataset: Dataset, object_filter) -> dict[str, set[str]]:
    by_user: dict[str, set[str]] = defaultdict(set)
    for r in dataset.ratings:
        if r.object_id in object_filter:
            by_user[r.user_id].add(r.object_id)
    return by_user


def corating_graph(dataset: Dataset, object_filter: Iterable[str],
                   max_raters: int | None = None) -> WeightedGraph:
    """Project the user-object rating relation onto users.

    Every user with a rating on a filtered object becomes a node, isolated or
    not. ``max_raters`` skips objects with more raters than that, with a
    warning; it is off by default.
    """
    object_filter = frozenset(object_filter)
    by_user = _ratings_of(dataset, object_filter)
    users = sorted(by_user, key=id_sort_key)
    index = {u: i for i, u in enumerate(users)}

    raters: dict[str, list[int]] = defaultdict(list)
    for u in users:
        for obj in by_user[u]:
            raters[obj].append(index[u])

    counts: dict[tuple[int, int], int] = defaultdict(int)
    for obj in sorted(raters, key=id_sort_key):
        members = raters[obj]
        if max_raters is not None and len(members) > max_raters:
            log.warning("skipping object %s with %d raters (cap %d)", obj, len(members), max_raters)
            continue
        members.sort()
        for pair in combinations(members, 2):
            counts[pair] += 1

    b = GraphBuilder(labels=users)
    for (u, v), w in sorted(counts.items()):
        b.add_edge(u, v, w)
    return b.build()


def topical_clusters(dataset: Dataset, catalog: ObjectCatalog | None,
                     topics: Iterable[str], max_raters: int | None = None) -> list[TopicalCluster]:
    """One co-rating graph per topic over the users who rated that topic's objects.

    A user rating several topics appears in several clusters. Topics with no
    rated object are left out.
    """
    catalog = dataset.catalog if catalog is None else catalog
    groups = object_topic_clusters(catalog, topics)
    rated = dataset.objects()
    out = []
    for topic, objs in groups.items():
        objs = objs & rated
        if not objs:
            continue
        out.append(TopicalCluster(topic, corating_graph(dataset, objs, max_raters), len(objs)))
    return out


def topic_objects(catalog: ObjectCatalog, topics: Iterable[str]) -> frozenset[str]:
    groups = object_topic_clusters(catalog, topics)
    return frozenset().union(*groups.values()) if groups else frozenset()


def basic_network(dataset: Dataset, catalog: ObjectCatalog | None, topics: Iterable[str],
                  all_objects: bool = False, max_raters: int | None = None) -> WeightedGraph:
    """Topic-blind co-rating graph over the union of the topics' objects, or all objects."""
    catalog = dataset.catalog if catalog is None else catalog
    objs = dataset.objects() if all_objects else topic_objects(catalog, topics)
    return corating_graph(dataset, objs, max_raters)
