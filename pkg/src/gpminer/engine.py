"""Extend-reduce-filter mining engine.

Every phase is data-parallel over contiguous index ranges of the input level
and ends with a barrier. Output levels are built by inspection-execution:
count children per parent, exclusive-scan the counts into write offsets,
then write each parent's children into its reserved range. Results depend
only on the input, never on the number of workers or the chunk size.
"""
from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Mapping

import numpy as np
from numba.core.dispatcher import Dispatcher

from . import _kernels as K
from .embedding import (EDGE, HIS_DTYPE, IDX_DTYPE, VERTEX, VID_DTYPE, EdgeLevel, EmbeddingList,
                        VertexLevel, chunks, init_single_edges)
from .graph import Graph
from .pattern import (CanonicalPattern, auto_canonical_edge, auto_canonical_vertex, canonicalize,
                      extend_all, quick_from_code, quick_pattern)
from .support import COUNT

__all__ = [
    "AppCallbacks",
    "EngineConfig",
    "PatternMap",
    "MineResult",
    "Miner",
    "mine",
    "exclusive_scan",
    "SERIAL_SCAN_THRESHOLD",
]

log = logging.getLogger(__name__)

# prefix sums shorter than this run serially
SERIAL_SCAN_THRESHOLD = 4096
BLOCKS_PER_WORKER = 8
MIN_BLOCK = 256


def _default_to_prune(pattern: CanonicalPattern, pmap: "PatternMap", min_support: int) -> bool:
    return pmap.value(pattern) < min_support


@dataclass(frozen=True)
class AppCallbacks:
    """Application hooks.

    Extension hooks follow the kernel signatures documented in
    :mod:`gpminer.pattern`; jitted hooks run compiled and parallel, plain
    Python hooks run through the interpreted kernels.

    ``get_pattern(g, emb, n, parent_id) -> int`` is an optional customized
    classifier returning memoized pattern ids that ``pattern_table`` maps to
    canonical patterns; it replaces quick-pattern canonicalization and
    supports count aggregation only. ``support`` bundles the per-embedding
    support and its aggregation operator. ``to_prune(pattern, pmap, min_support)``
    decides which patterns' embeddings the filter phase drops.
    """

    to_extend: Callable = extend_all
    to_add_vertex: Callable = auto_canonical_vertex
    to_add_edge: Callable = auto_canonical_edge
    get_pattern: Callable | None = None
    pattern_table: Mapping[int, CanonicalPattern] | None = None
    support: Any = COUNT
    to_prune: Callable = _default_to_prune
    reduce_enabled: bool = False
    filter_enabled: bool = False

    def __post_init__(self):
        if self.filter_enabled and not self.reduce_enabled:
            raise ValueError("filter needs reduce")
        if self.get_pattern is not None:
            if self.pattern_table is None:
                raise ValueError("a custom get_pattern needs a pattern_table")
            if self.support is not COUNT:
                raise ValueError("custom pattern ids only support count aggregation")

    @property
    def compiled(self) -> bool:
        hooks = [self.to_extend, self.to_add_vertex, self.to_add_edge]
        if self.get_pattern is not None:
            hooks.append(self.get_pattern)
        return all(isinstance(h, Dispatcher) for h in hooks)


@dataclass(frozen=True)
class EngineConfig:
    max_size: int
    mode: str = VERTEX
    chunk_size: int | None = 1024
    min_support: int = 0
    num_workers: int = 1
    collect: bool = False

    def __post_init__(self):
        if self.max_size < 2:
            raise ValueError("max_size must be >= 2")
        if self.mode not in (VERTEX, EDGE):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.num_workers < 1:
            raise ValueError("num_workers must be >= 1")
        if self.chunk_size is not None and self.chunk_size < 0:
            raise ValueError("chunk_size must be >= 0")

    @property
    def chunking(self) -> bool:
        return bool(self.chunk_size)


class PatternMap:
    """Canonical pattern -> aggregated support."""

    def __init__(self, kind=COUNT, entries: dict | None = None):
        self.kind = kind
        self.entries: dict[CanonicalPattern, Any] = dict(entries or {})

    def add(self, pattern: CanonicalPattern, support) -> None:
        cur = self.entries.get(pattern)
        self.entries[pattern] = support if cur is None else self.kind.aggregate(cur, support)

    def merge(self, other: "PatternMap") -> None:
        for p, s in other.entries.items():
            self.add(p, s)

    def value(self, pattern: CanonicalPattern) -> int:
        s = self.entries.get(pattern)
        return 0 if s is None else self.kind.value(s, pattern)

    def values(self) -> dict[CanonicalPattern, int]:
        return {p: self.kind.value(s, p) for p, s in self.entries.items()}

    def __getitem__(self, pattern):
        return self.entries[pattern]

    def __contains__(self, pattern) -> bool:
        return pattern in self.entries

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def items(self):
        return self.entries.items()

    def sorted_rows(self) -> list[tuple[str, int]]:
        rows = [(p.to_text(), v) for p, v in self.values().items()]
        rows.sort(key=lambda r: (-r[1], r[0]))
        return rows

    def to_tsv(self, header: bool = True) -> str:
        lines = ["pattern\tsupport"] if header else []
        lines += [f"{p}\t{v}" for p, v in self.sorted_rows()]
        return "\n".join(lines) + "\n"


@dataclass
class MineResult:
    pattern_map: PatternMap
    num_embeddings: int
    embedding_list: EmbeddingList | None = None
    final: np.ndarray | None = None
    level_maps: list[PatternMap] = field(default_factory=list)


def exclusive_scan(counts: np.ndarray, pool: ThreadPoolExecutor | None = None,
                   blocks: int = 1) -> tuple[np.ndarray, int]:
    """Exclusive prefix sum; blocked over ``pool`` for long inputs."""
    n = counts.shape[0]
    offsets = np.zeros(n, dtype=np.int64)
    if n == 0:
        return offsets, 0
    if pool is None or blocks <= 1 or n < SERIAL_SCAN_THRESHOLD:
        np.cumsum(counts[:-1], out=offsets[1:])
        return offsets, int(offsets[-1] + counts[-1])
    bounds = np.linspace(0, n, blocks + 1).astype(np.int64)
    totals = list(pool.map(lambda b: int(counts[bounds[b]:bounds[b + 1]].sum()), range(blocks)))
    base = np.concatenate([[0], np.cumsum(totals)[:-1]])

    def fill(b):
        lo, hi = bounds[b], bounds[b + 1]
        if hi > lo:
            seg = offsets[lo:hi]
            seg[0] = base[b]
            np.cumsum(counts[lo:hi - 1], out=seg[1:])
            seg[1:] += base[b]

    list(pool.map(fill, range(blocks)))
    return offsets, int(sum(totals))


class Miner:
    """Runs the phases for one graph, configuration and callback set."""

    def __init__(self, g: Graph, config: EngineConfig, cb: AppCallbacks):
        if config.mode == EDGE and g.is_oriented:
            raise ValueError("edge-induced mining needs an undirected graph")
        if cb.filter_enabled and config.chunking:
            raise ValueError("edge blocking cannot be combined with the filter phase")
        self.g = g
        self.config = config
        self.cb = cb
        self.pool: ThreadPoolExecutor | None = None
        self._compiled = cb.compiled

    # parallel plumbing -------------------------------------------------------------
    def _kernel(self, fn):
        return fn if self._compiled else fn.py_func

    def _ranges(self, n: int) -> list[tuple[int, int]]:
        workers = self.config.num_workers
        nblocks = workers * BLOCKS_PER_WORKER if self._compiled else workers
        nblocks = max(1, min(nblocks, -(-n // MIN_BLOCK)))
        bounds = np.linspace(0, n, nblocks + 1).astype(np.int64)
        return [(int(bounds[b]), int(bounds[b + 1])) for b in range(nblocks) if bounds[b + 1] > bounds[b]]

    def _parallel(self, n: int, body: Callable[[int, int], None]) -> None:
        ranges = self._ranges(n)
        if self.pool is None or len(ranges) == 1:
            for lo, hi in ranges:
                body(lo, hi)
        else:
            for f in [self.pool.submit(body, lo, hi) for lo, hi in ranges]:
                f.result()

    def _scan(self, counts):
        return exclusive_scan(counts, self.pool, self.config.num_workers)

    # phases ------------------------------------------------------------------------
    def extend(self, elist: EmbeddingList, count_only: bool = False):
        """Next level from ``elist``'s top level; with ``count_only`` just the child count."""
        level = elist.current_level
        m = elist.size()
        g = self.g.csr
        idx, vid = elist.idx_tuple(), elist.vid_tuple()
        counts = np.zeros(m, dtype=np.int64)
        none_i = np.empty(0, IDX_DTYPE)
        none_v = np.empty(0, VID_DTYPE)
        cb = self.cb
        if elist.mode == VERTEX:
            kern = self._kernel(K.vertex_extend)
            self._parallel(m, lambda lo, hi: kern(g, idx, vid, level, lo, hi, cb.to_extend, cb.to_add_vertex,
                                                  False, counts, none_i, none_v, counts))
        else:
            his = elist.his_tuple()
            none_h = np.empty(0, HIS_DTYPE)
            kern = self._kernel(K.edge_extend)
            self._parallel(m, lambda lo, hi: kern(g, idx, vid, his, level, lo, hi, cb.to_extend,
                                                  cb.to_add_edge, False, counts, none_i, none_v,
                                                  none_h, counts))
        if count_only:
            return int(counts.sum())
        offsets, total = self._scan(counts)
        out_idx = np.empty(total, IDX_DTYPE)
        out_vid = np.empty(total, VID_DTYPE)
        if elist.mode == VERTEX:
            self._parallel(m, lambda lo, hi: kern(g, idx, vid, level, lo, hi, cb.to_extend, cb.to_add_vertex,
                                                  True, offsets, out_idx, out_vid, counts))
            return VertexLevel(out_idx, out_vid)
        out_his = np.empty(total, HIS_DTYPE)
        self._parallel(m, lambda lo, hi: kern(g, idx, vid, his, level, lo, hi, cb.to_extend, cb.to_add_edge,
                                              True, offsets, out_idx, out_vid, out_his, counts))
        return EdgeLevel(out_idx, out_vid, out_his)

    def pattern_ids(self, elist: EmbeddingList, parent_pids: np.ndarray | None) -> np.ndarray:
        """Memoized custom-classifier ids for the top level."""
        level = elist.current_level
        m = elist.size()
        out = np.empty(m, dtype=np.int64)
        parents = parent_pids if parent_pids is not None else np.zeros(1, np.int64)
        g = self.g.csr
        cb = self.cb
        if elist.mode == VERTEX:
            kern = self._kernel(K.vertex_pids)
            idx, vid = elist.idx_tuple(), elist.vid_tuple()
            self._parallel(m, lambda lo, hi: kern(g, idx, vid, level, lo, hi, parents, cb.get_pattern, out))
        else:
            kern = self._kernel(K.edge_pids)
            idx, vid, his = elist.idx_tuple(), elist.vid_tuple(), elist.his_tuple()
            self._parallel(m, lambda lo, hi: kern(g, idx, vid, his, level, lo, hi, parents,
                                                  cb.get_pattern, out))
        return out

    def extend_classify(self, elist: EmbeddingList, parent_pids: np.ndarray) -> tuple[PatternMap, int]:
        """Final vertex-mode level with a memoized classifier, tallied without materializing it."""
        level = elist.current_level
        m = elist.size()
        g = self.g.csr
        cb = self.cb
        table = cb.pattern_table
        ranges = self._ranges(m)
        hist = np.zeros((max(len(ranges), 1), max(table) + 1), dtype=np.int64)
        kern = self._kernel(K.vertex_extend_classify)
        idx, vid = elist.idx_tuple(), elist.vid_tuple()

        def body(b):
            lo, hi = ranges[b]
            kern(g, idx, vid, level, lo, hi, cb.to_extend, cb.to_add_vertex, parent_pids, cb.get_pattern, hist[b])

        if self.pool is None:
            for b in range(len(ranges)):
                body(b)
        else:
            list(self.pool.map(body, range(len(ranges))))
        totals = hist.sum(axis=0)
        pmap = PatternMap(cb.support)
        for pid in np.flatnonzero(totals):
            pmap.add(table[int(pid)], cb.support.of_count(int(totals[pid])))
        return pmap, int(totals.sum())

    def _quick_keys(self, elist: EmbeddingList):
        """Per-embedding (codes, vertex matrix or None, vertex count or None)."""
        level = elist.current_level
        m = elist.size()
        g = self.g.csr
        codes = np.empty(m, dtype=np.int64)
        idx, vid = elist.idx_tuple(), elist.vid_tuple()
        need_verts = self.g.is_labeled or self.cb.support is not COUNT
        if elist.mode == VERTEX:
            kern = self._kernel(K.vertex_codes)
            self._parallel(m, lambda lo, hi: kern(g, idx, vid, level, lo, hi, codes))
            codes |= (level + 1) << 32
            verts = elist.level_vertices() if need_verts else None
        else:
            his = elist.his_tuple()
            verts = np.empty((m, level + 1), dtype=np.int64)
            kern = self._kernel(K.edge_codes)
            self._parallel(m, lambda lo, hi: kern(g, idx, vid, his, level, lo, hi, codes, verts))
        return codes, verts

    def reduce(self, elist: EmbeddingList, pids: np.ndarray | None = None):
        """Aggregate the top level into a pattern map.

        Returns ``(pmap, patterns, emb_pattern)`` where ``patterns[emb_pattern[i]]``
        is the canonical pattern of entry ``i``.
        """
        kind = self.cb.support
        pmap = PatternMap(kind)
        m = elist.size()
        if m == 0:
            return pmap, [], np.empty(0, dtype=np.int64)
        if self.cb.get_pattern is not None:
            ids, inverse, counts = np.unique(pids, return_inverse=True, return_counts=True)
            table = self.cb.pattern_table
            patterns = sorted({table[int(i)] for i in ids})
            where = {p: k for k, p in enumerate(patterns)}
            group_to_pattern = np.array([where[table[int(i)]] for i in ids], dtype=np.int64)
            for i, c in zip(ids, counts):
                pmap.add(table[int(i)], kind.of_count(int(c)))
            return pmap, patterns, group_to_pattern[inverse.ravel()]

        codes, verts = self._quick_keys(elist)
        labeled = self.g.is_labeled
        if labeled:
            lab = np.where(verts >= 0, self.g.labels[np.maximum(verts, 0)], -1)
            keys = np.column_stack([codes, lab])
            uniq, inverse, counts = np.unique(keys, axis=0, return_inverse=True, return_counts=True)
            inverse = inverse.ravel()
        else:
            uniq, inverse, counts = np.unique(codes, return_inverse=True, return_counts=True)
            uniq = uniq[:, None]
        order = None
        if kind is not COUNT:
            order = np.argsort(inverse, kind="stable")
            starts = np.concatenate([[0], np.cumsum(counts)])
        canon = []
        for q, row in enumerate(uniq):
            code = int(row[0])
            nv = code >> 32
            labels = row[1:1 + nv] if labeled else None
            qp = quick_from_code(nv, code & 0xFFFFFFFF, labels)
            cp, pm = canonicalize(qp)
            canon.append(cp)
            if kind is COUNT:
                pmap.add(cp, int(counts[q]))
            else:
                rows = order[starts[q]:starts[q + 1]]
                pmap.add(cp, kind.of_group(verts[rows, :nv], pm))
        patterns = sorted(set(canon))
        where = {p: k for k, p in enumerate(patterns)}
        group_to_pattern = np.array([where[c] for c in canon], dtype=np.int64)
        return pmap, patterns, group_to_pattern[inverse]

    def filter(self, elist: EmbeddingList, pmap: PatternMap, patterns, emb_pattern: np.ndarray):
        """Drop embeddings whose pattern ``to_prune`` rejects; returns (kept rows, pruned pmap)."""
        prune = np.array([bool(self.cb.to_prune(p, pmap, self.config.min_support)) for p in patterns],
                         dtype=bool)
        keep = ~prune[emb_pattern] if len(patterns) else np.zeros(0, dtype=bool)
        rows = self._compact(keep)
        elist.replace_top(elist.levels[-1].take(rows))
        kept = PatternMap(pmap.kind, {p: s for p, s in pmap.items() if not prune[patterns.index(p)]})
        return rows, kept

    def _compact(self, keep: np.ndarray) -> np.ndarray:
        """Indices of true entries, written through the count/scan/write protocol."""
        n = keep.shape[0]
        ranges = self._ranges(n)
        block_counts = np.array([int(keep[lo:hi].sum()) for lo, hi in ranges], dtype=np.int64)
        offsets, total = exclusive_scan(block_counts)
        out = np.empty(total, dtype=np.int64)

        def write(b):
            lo, hi = ranges[b]
            sel = np.flatnonzero(keep[lo:hi]) + lo
            out[offsets[b]:offsets[b] + sel.shape[0]] = sel

        if self.pool is None:
            for b in range(len(ranges)):
                write(b)
        else:
            list(self.pool.map(write, range(len(ranges))))
        return out

    # driver ------------------------------------------------------------------------
    def _run(self, elist: EmbeddingList) -> MineResult:
        cfg, cb = self.config, self.cb
        last_level = cfg.max_size - 1
        memo = cb.get_pattern is not None
        level_maps: list[PatternMap] = []
        pids = self.pattern_ids(elist, None) if memo else None

        def reduce_filter(pids):
            pmap, patterns, emb_pattern = self.reduce(elist, pids)
            rows, pmap = self.filter(elist, pmap, patterns, emb_pattern)
            level_maps.append(pmap)
            return pmap, (pids[rows] if pids is not None else None)

        pmap = PatternMap(cb.support)
        if cb.filter_enabled:
            pmap, pids = reduce_filter(pids)
        while elist.current_level < last_level:
            if len(elist) == 0:
                break
            final_step = elist.current_level + 1 == last_level
            if final_step and not (cb.reduce_enabled or cfg.collect):
                return MineResult(pmap, self.extend(elist, count_only=True), elist, None, level_maps)
            if final_step and memo and elist.mode == VERTEX and not (cb.filter_enabled or cfg.collect):
                pmap, total = self.extend_classify(elist, pids)
                return MineResult(pmap, total, elist, None, level_maps)
            elist.push(self.extend(elist))
            if memo:
                pids = self.pattern_ids(elist, pids)
            if cb.filter_enabled:
                pmap, pids = reduce_filter(pids)
        if elist.current_level < last_level:
            # worklist died out early
            return MineResult(pmap, 0, elist, np.empty((0, cfg.max_size), np.int64) if cfg.collect else None,
                              level_maps)
        if cb.reduce_enabled and not cb.filter_enabled:
            pmap = self.reduce(elist, pids)[0]
        final = elist.level_vertices() if cfg.collect else None
        return MineResult(pmap, len(elist), elist, final, level_maps)

    def mine(self) -> MineResult:
        cfg = self.config
        base = init_single_edges(self.g, cfg.mode)
        parts = chunks(base, cfg.chunk_size) if cfg.chunking else [base]
        self.pool = ThreadPoolExecutor(cfg.num_workers) if cfg.num_workers > 1 else None
        try:
            if len(parts) == 1:
                return self._run(parts[0])
            total = MineResult(PatternMap(self.cb.support), 0)
            finals = []
            for part in parts:
                r = self._run(part)
                total.pattern_map.merge(r.pattern_map)
                total.num_embeddings += r.num_embeddings
                if r.final is not None:
                    finals.append(r.final)
            if cfg.collect:
                total.final = np.concatenate(finals) if finals else np.empty((0, cfg.max_size), np.int64)
            return total
        finally:
            if self.pool is not None:
                self.pool.shutdown()
                self.pool = None


def mine(g: Graph, config: EngineConfig, cb: AppCallbacks) -> MineResult:
    """Run init, then extend/reduce/filter level by level until ``config.max_size``."""
    return Miner(g, config, cb).mine()


def reduce_direct(elist: EmbeddingList, g: Graph, kind=COUNT) -> PatternMap:
    """Slow reference reduction: canonicalize every embedding individually."""
    pmap = PatternMap(kind)
    for emb in elist.embeddings():
        qp = quick_pattern(emb, g)
        cp, pm = canonicalize(qp)
        pmap.add(cp, kind.of_embedding(emb.vertices, pm))
    return pmap
