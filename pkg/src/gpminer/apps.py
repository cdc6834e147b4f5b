"""Triangle counting, k-clique finding, motif counting and frequent subgraph mining."""
from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from numba import njit

from .embedding import EDGE
from .engine import AppCallbacks, EngineConfig, PatternMap, mine
from .graph import Graph, connected, orient_dag
from .pattern import (CanonicalPattern, QuickPattern, canonicalize, extend_last, motif_pattern_table,
                      motif_pid)
from .support import DomainSupportKind, orbit_mni

__all__ = [
    "AppResult",
    "triangle_count",
    "clique_find",
    "motif_count",
    "fsm",
    "motif_universe",
    "tc_callbacks",
    "cf_callbacks",
    "mc_callbacks",
    "fsm_callbacks",
]

MAX_CLIQUE_K = 9
MOTIF_KS = (3, 4, 5)


@dataclass
class AppResult:
    app: str
    total_count: int | None = None
    pattern_map: PatternMap | None = None
    elapsed: float = 0.0
    config: dict = field(default_factory=dict)
    embeddings: np.ndarray | None = None

    def payload(self) -> str:
        """Human-readable result; never contains timing, so it is stable across runs."""
        if self.app == "tc":
            return f"triangles: {self.total_count}\n"
        if self.app == "cf":
            out = f"{self.config['k']}-cliques: {self.total_count}\n"
            if self.embeddings is not None:
                out += "".join(" ".join(map(str, row)) + "\n" for row in self.embeddings)
            return out
        return self.pattern_map.to_tsv()

    def to_json(self) -> str:
        rec = {"app": self.app, "elapsed": round(self.elapsed, 6), **self.config}
        if self.total_count is not None:
            rec["count"] = self.total_count
        if self.pattern_map is not None:
            rec["patterns"] = {p: v for p, v in self.pattern_map.sorted_rows()}
        return json.dumps(rec, sort_keys=True, separators=(",", ":"))


def _original_ids(g: Graph, rows: np.ndarray) -> np.ndarray:
    return g.original_ids[rows] if g.original_ids is not None else rows


@njit(nogil=True, cache=True)
def _tc_add(g, emb, n, src, u):
    # without orientation, ascending ids give each triangle a unique order
    if not g.oriented and u <= emb[n - 1]:
        return False
    return connected(g, emb[0], u)


@njit(nogil=True, cache=True)
def _clique_add(g, emb, n, src, u):
    if not g.oriented and u <= emb[n - 1]:
        return False
    for i in range(n - 1):
        if not connected(g, emb[i], u):
            return False
    return True


def tc_callbacks() -> AppCallbacks:
    return AppCallbacks(to_extend=extend_last, to_add_vertex=_tc_add)


def cf_callbacks() -> AppCallbacks:
    return AppCallbacks(to_extend=extend_last, to_add_vertex=_clique_add)


def mc_callbacks(k: int, classifier: str = "custom") -> AppCallbacks:
    if classifier == "custom" and k in (3, 4):
        return AppCallbacks(get_pattern=motif_pid, pattern_table=motif_pattern_table(), reduce_enabled=True)
    if classifier not in ("custom", "generic"):
        raise ValueError(f"unknown classifier {classifier!r}")
    return AppCallbacks(reduce_enabled=True)


def _prune_by_orbit_mni(pattern, pmap: PatternMap, min_support: int) -> bool:
    return orbit_mni(pmap[pattern], pattern) < min_support


def fsm_callbacks(mapping: str = "canonical") -> AppCallbacks:
    """Edge-mode reduce+filter callbacks.

    Pruning always uses the orbit-pooled MNI. It is anti-monotone and bounds
    the canonical-mapping MNI of every superpattern from above, so dropping a
    pattern below the threshold never loses an embedding of a pattern that
    is frequent under either mapping. ``mapping`` picks the reported value.
    """
    return AppCallbacks(support=DomainSupportKind(mapping), to_prune=_prune_by_orbit_mni,
                        reduce_enabled=True, filter_enabled=True)


def _prepare_dag(g: Graph, orient: bool) -> Graph:
    if orient and not g.is_oriented:
        return orient_dag(g)
    return g


def triangle_count(g: Graph, num_workers: int = 1, chunk_size: int | None = 1024,
                   orient: bool = True) -> AppResult:
    g = _prepare_dag(g, orient)
    cfg = EngineConfig(max_size=3, num_workers=num_workers, chunk_size=chunk_size)
    t0 = time.perf_counter()
    r = mine(g, cfg, tc_callbacks())
    return AppResult("tc", r.num_embeddings, elapsed=time.perf_counter() - t0)


def clique_find(g: Graph, k: int, num_workers: int = 1, chunk_size: int | None = 1024,
                orient: bool = True, listing: bool = False) -> AppResult:
    if not 3 <= k <= MAX_CLIQUE_K:
        raise ValueError(f"k must be in [3, {MAX_CLIQUE_K}]")
    g = _prepare_dag(g, orient)
    cfg = EngineConfig(max_size=k, num_workers=num_workers, chunk_size=chunk_size, collect=listing)
    t0 = time.perf_counter()
    r = mine(g, cfg, cf_callbacks())
    elapsed = time.perf_counter() - t0
    emb = None
    if listing:
        emb = np.sort(_original_ids(g, r.final), axis=1)
    return AppResult("cf", r.num_embeddings, elapsed=elapsed, config={"k": k}, embeddings=emb)


@lru_cache(maxsize=None)
def motif_universe(k: int) -> tuple[CanonicalPattern, ...]:
    """Canonical forms of all connected unlabeled k-vertex graphs."""
    pairs = [(i, j) for j in range(k) for i in range(j)]
    found = set()
    for mask in range(1 << len(pairs)):
        edges = [pairs[b] for b in range(len(pairs)) if mask >> b & 1]
        if len(edges) < k - 1 or not _is_connected_pattern(k, edges):
            continue
        found.add(canonicalize(QuickPattern.build(k, edges))[0])
    return tuple(sorted(found))


def _is_connected_pattern(k, edges) -> bool:
    seen = {0}
    frontier = [0]
    while frontier:
        x = frontier.pop()
        for i, j in edges:
            for a, b in ((i, j), (j, i)):
                if a == x and b not in seen:
                    seen.add(b)
                    frontier.append(b)
    return len(seen) == k


def motif_count(g: Graph, k: int, num_workers: int = 1, chunk_size: int | None = 1024,
                classifier: str = "custom") -> AppResult:
    if k not in MOTIF_KS:
        raise ValueError(f"motif counting supports k in {MOTIF_KS}")
    if g.is_oriented:
        raise ValueError("motif counting runs on the undirected graph")
    if g.is_labeled:
        # structural motifs only
        g = Graph(g.row_offsets, g.column_indices, original_ids=g.original_ids)
    cfg = EngineConfig(max_size=k, num_workers=num_workers, chunk_size=chunk_size)
    t0 = time.perf_counter()
    r = mine(g, cfg, mc_callbacks(k, classifier))
    elapsed = time.perf_counter() - t0
    pmap = r.pattern_map
    for p in motif_universe(k):
        if p not in pmap:
            pmap.entries[p] = 0
    return AppResult("mc", pattern_map=pmap, elapsed=elapsed, config={"k": k})


def fsm(g: Graph, k: int, sigma: int, num_workers: int = 1, mapping: str = "canonical") -> AppResult:
    """Patterns with up to ``k - 1`` edges whose domain support is at least ``sigma``.

    ``mapping="canonical"`` maps each embedding's vertices through its single
    canonical position map. ``mapping="orbit"`` also pools the positions of
    each automorphism orbit, which gives the all-isomorphism MNI. Both are
    exact for their definition because pruning uses the orbit value.
    """
    if not g.is_labeled:
        raise ValueError("frequent subgraph mining needs a labeled graph")
    if k < 2:
        raise ValueError("k must be >= 2")
    cfg = EngineConfig(max_size=k, mode=EDGE, chunk_size=None, min_support=sigma, num_workers=num_workers)
    t0 = time.perf_counter()
    r = mine(g, cfg, fsm_callbacks(mapping))
    out = PatternMap(r.pattern_map.kind)
    for level_map in r.level_maps:
        for p, s in level_map.items():
            if level_map.kind.value(s, p) >= sigma:
                out.add(p, s)
    elapsed = time.perf_counter() - t0
    return AppResult("fsm", pattern_map=out, elapsed=elapsed, config={"k": k, "minsup": sigma})
