"""Level-structured structure-of-arrays storage for partial embeddings.

Level ``l`` (1-based) holds one entry per embedding of that level. Every entry
stores ``vid`` (the vertex added at this level) and ``idx`` (the position of
its parent entry in level ``l - 1``). Level 1 has no stored parent level; its
``idx`` column holds the first vertex id directly, i.e. the position in the
conceptual level 0 where entry ``v`` is vertex ``v``.

Edge-induced levels add a ``his`` column: entry ``(idx, vid, his)`` is the
edge from the vertex introduced at level ``his`` to ``vid``. Level 0's vertex
is the first level's ``idx``. ``vid`` may repeat an earlier vertex when the
edge closes a cycle.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, TextIO

import numpy as np

from .graph import Graph

__all__ = [
    "VERTEX",
    "EDGE",
    "Embedding",
    "VertexLevel",
    "EdgeLevel",
    "EmbeddingList",
    "init_single_edges",
    "chunks",
]

VERTEX = "vertex"
EDGE = "edge"

IDX_DTYPE = np.int64
VID_DTYPE = np.int32
HIS_DTYPE = np.int8


@dataclass(frozen=True)
class Embedding:
    """Vertices in insertion order; ``edges`` lists (source position, destination id)."""

    vertices: tuple[int, ...]
    edges: tuple[tuple[int, int], ...] | None = None

    @property
    def size(self) -> int:
        return len(self.vertices)

    def edge_pairs(self) -> list[tuple[int, int]]:
        """Edges as (source id, destination id) pairs, edge mode only."""
        if self.edges is None:
            raise ValueError("vertex-induced embedding has no explicit edges")
        return [(self.vertices[p], v) for p, v in self.edges]


@dataclass(frozen=True)
class VertexLevel:
    idx: np.ndarray
    vid: np.ndarray

    def __post_init__(self):
        if self.idx.shape != self.vid.shape:
            raise ValueError("idx and vid columns must have equal length")

    def __len__(self) -> int:
        return self.idx.shape[0]

    def columns(self) -> dict[str, np.ndarray]:
        return {"idx": self.idx, "vid": self.vid}

    def take(self, keep: np.ndarray) -> "VertexLevel":
        return VertexLevel(self.idx[keep], self.vid[keep])


@dataclass(frozen=True)
class EdgeLevel:
    idx: np.ndarray
    vid: np.ndarray
    his: np.ndarray

    def __post_init__(self):
        if not (self.idx.shape == self.vid.shape == self.his.shape):
            raise ValueError("idx, vid and his columns must have equal length")

    def __len__(self) -> int:
        return self.idx.shape[0]

    def columns(self) -> dict[str, np.ndarray]:
        return {"idx": self.idx, "vid": self.vid, "his": self.his}

    def take(self, keep: np.ndarray) -> "EdgeLevel":
        return EdgeLevel(self.idx[keep], self.vid[keep], self.his[keep])


class EmbeddingList:
    """Prefix-tree worklist; ``levels[l - 1]`` is level ``l``."""

    def __init__(self, mode: str, levels: list | None = None):
        if mode not in (VERTEX, EDGE):
            raise ValueError(f"unknown mode {mode!r}")
        self.mode = mode
        self.levels: list = list(levels or [])

    @property
    def current_level(self) -> int:
        return len(self.levels)

    def size(self, level: int | None = None) -> int:
        level = self.current_level if level is None else level
        return len(self.levels[level - 1])

    def __len__(self) -> int:
        return self.size() if self.levels else 0

    def push(self, level) -> None:
        expected = EdgeLevel if self.mode == EDGE else VertexLevel
        if not isinstance(level, expected):
            raise TypeError(f"{self.mode} list takes {expected.__name__}")
        self.levels.append(level)

    def replace_top(self, level) -> None:
        self.levels[-1] = level

    # kernel views -----------------------------------------------------------------
    def idx_tuple(self, level: int | None = None) -> tuple:
        level = self.current_level if level is None else level
        return tuple(lv.idx for lv in self.levels[:level])

    def vid_tuple(self, level: int | None = None) -> tuple:
        level = self.current_level if level is None else level
        return tuple(lv.vid for lv in self.levels[:level])

    def his_tuple(self, level: int | None = None) -> tuple:
        level = self.current_level if level is None else level
        return tuple(lv.his for lv in self.levels[:level])

    # reconstruction ---------------------------------------------------------------
    def reconstruct(self, level: int, position: int) -> Embedding:
        """Backtrack idx links from ``level`` down to level 1."""
        if not 1 <= level <= self.current_level:
            raise IndexError(f"level {level} out of range")
        if not 0 <= position < self.size(level):
            raise IndexError(f"position {position} out of range for level {level}")
        chain = []
        his = []
        p = position
        for lv in reversed(self.levels[:level]):
            chain.append(int(lv.vid[p]))
            if self.mode == EDGE:
                his.append(int(lv.his[p]))
            p = int(lv.idx[p])
        chain.append(p)
        chain.reverse()
        if self.mode == VERTEX:
            return Embedding(tuple(chain))
        his.reverse()
        return _edge_embedding(chain, his)

    def level_vertices(self, level: int | None = None, rows: np.ndarray | None = None) -> np.ndarray:
        """(m, level + 1) matrix; column ``j`` is the vertex recorded at level ``j``."""
        level = self.current_level if level is None else level
        cur = np.arange(self.size(level)) if rows is None else np.asarray(rows)
        out = np.empty((cur.shape[0], level + 1), dtype=np.int64)
        for l in range(level, 0, -1):
            lv = self.levels[l - 1]
            out[:, l] = lv.vid[cur]
            cur = lv.idx[cur]
        out[:, 0] = cur
        return out

    def level_his(self, level: int | None = None) -> np.ndarray:
        """(m, level) matrix of ``his`` values along each entry's chain (edge mode)."""
        if self.mode != EDGE:
            raise ValueError("his exists only for edge-induced lists")
        level = self.current_level if level is None else level
        cur = np.arange(self.size(level))
        out = np.empty((cur.shape[0], level), dtype=np.int64)
        for l in range(level, 0, -1):
            lv = self.levels[l - 1]
            out[:, l - 1] = lv.his[cur]
            cur = lv.idx[cur]
        return out

    def embeddings(self, level: int | None = None) -> Iterator[Embedding]:
        level = self.current_level if level is None else level
        for i in range(self.size(level)):
            yield self.reconstruct(level, i)

    def validate(self) -> None:
        """Structural check of idx/his links; raises AssertionError on corruption."""
        for l, lv in enumerate(self.levels, start=1):
            if len(lv) == 0:
                continue
            if l > 1:
                prev = len(self.levels[l - 2])
                assert lv.idx.min() >= 0 and lv.idx.max() < prev, f"level {l}: idx out of bounds"
            if self.mode == EDGE:
                assert lv.his.min() >= 0 and lv.his.max() < l, f"level {l}: his >= level"

    def dump_tsv(self, level: int, out: TextIO) -> None:
        lv = self.levels[level - 1]
        cols = lv.columns()
        has_his = "his" in cols
        out.write("level\tposition\tidx\tvid" + ("\this" if has_his else "") + "\n")
        for i in range(len(lv)):
            row = f"{level}\t{i}\t{cols['idx'][i]}\t{cols['vid'][i]}"
            if has_his:
                row += f"\t{cols['his'][i]}"
            out.write(row + "\n")


def _edge_embedding(chain: list[int], his: list[int]) -> Embedding:
    verts: list[int] = []
    pos_of: dict[int, int] = {}
    level_pos = []
    for v in chain:
        if v not in pos_of:
            pos_of[v] = len(verts)
            verts.append(v)
        level_pos.append(pos_of[v])
    edges = tuple((level_pos[h], chain[l]) for l, h in enumerate(his, start=1))
    return Embedding(tuple(verts), edges)


def init_single_edges(g: Graph, mode: str = VERTEX) -> EmbeddingList:
    """Level 1: every edge once (u < v if undirected, each arc if oriented)."""
    e = g.edges()
    idx = np.ascontiguousarray(e[:, 0], dtype=IDX_DTYPE)
    vid = np.ascontiguousarray(e[:, 1], dtype=VID_DTYPE)
    if mode == VERTEX:
        return EmbeddingList(VERTEX, [VertexLevel(idx, vid)])
    if mode == EDGE:
        if g.is_oriented:
            raise ValueError("edge-induced mining needs an undirected graph")
        return EmbeddingList(EDGE, [EdgeLevel(idx, vid, np.zeros(len(idx), dtype=HIS_DTYPE))])
    raise ValueError(f"unknown mode {mode!r}")


def chunks(elist: EmbeddingList, chunk_size: int) -> list[EmbeddingList]:
    """Split a level-1 list into contiguous blocks of at most ``chunk_size`` entries."""
    if elist.current_level != 1:
        raise ValueError("only a level-1 list can be blocked")
    if chunk_size < 1:
        raise ValueError("chunk_size must be >= 1")
    lv = elist.levels[0]
    n = len(lv)
    out = []
    for start in range(0, max(n, 1), chunk_size):
        sl = slice(start, min(start + chunk_size, n))
        cols = {k: np.ascontiguousarray(v[sl]) for k, v in lv.columns().items()}
        out.append(EmbeddingList(elist.mode, [type(lv)(**cols)]))
    return out
