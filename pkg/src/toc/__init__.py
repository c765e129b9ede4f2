"""Topic-oriented community detection on rating-based social networks."""

__version__ = "0.1.0"

from .graph import GraphBuilder, Partition, WeightedGraph, aggregate
from .ingest import Dataset, ObjectCatalog, RatingRecord
from .louvain import LouvainParams, louvain, run_averaged
from .metrics import modularity, purity, purq, total_modularity
from .pipeline import PipelineParams, compare, run_classical, run_topic_oriented

__all__ = [
    "GraphBuilder", "Partition", "WeightedGraph", "aggregate",
    "Dataset", "ObjectCatalog", "RatingRecord",
    "LouvainParams", "louvain", "run_averaged",
    "modularity", "purity", "purq", "total_modularity",
    "PipelineParams", "compare", "run_classical", "run_topic_oriented",
]
