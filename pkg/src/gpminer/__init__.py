"""Embedding-centric graph pattern mining with an extend-reduce-filter engine."""
from .apps import AppResult, clique_find, fsm, motif_count, triangle_count
from .embedding import EDGE, VERTEX, Embedding, EmbeddingList, chunks, init_single_edges
from .engine import AppCallbacks, EngineConfig, MineResult, PatternMap, mine
from .graph import Graph, from_edges, is_connected, load_edge_list, load_labeled_graph, orient_dag
from .pattern import CanonicalPattern, PositionMap, QuickPattern, canonicalize, quick_pattern

__version__ = "0.1.0"

__all__ = [
    "AppResult", "clique_find", "fsm", "motif_count", "triangle_count",
    "EDGE", "VERTEX", "Embedding", "EmbeddingList", "chunks", "init_single_edges",
    "AppCallbacks", "EngineConfig", "MineResult", "PatternMap", "mine",
    "Graph", "from_edges", "is_connected", "load_edge_list", "load_labeled_graph", "orient_dag",
    "CanonicalPattern", "PositionMap", "QuickPattern", "canonicalize", "quick_pattern",
]
