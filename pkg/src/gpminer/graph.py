"""CSR graph storage, text loaders, degree-based orientation and connectivity."""
from __future__ import annotations

import io
import os
from collections import namedtuple
from dataclasses import dataclass, field
from typing import Iterable, TextIO, Union

import numpy as np
from numba import njit

__all__ = [
    "CSR",
    "Graph",
    "GraphFormatError",
    "from_edges",
    "load_edge_list",
    "load_labeled_graph",
    "write_edge_list",
    "write_labeled_graph",
    "orient_dag",
    "is_connected",
    "connected",
    "adjacent",
]

# Kernel-facing view of a graph. ``labels`` is an empty array for unlabeled graphs.
CSR = namedtuple("CSR", ["row_offsets", "column_indices", "labels", "oriented"])

Source = Union[str, os.PathLike, TextIO, Iterable[str]]


class GraphFormatError(ValueError):
    """Raised for malformed graph input; carries the 1-based line number when known."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


@dataclass(frozen=True, eq=False)
class Graph:
    """Immutable CSR adjacency with optional vertex labels.

    ``row_offsets`` has length ``num_vertices + 1`` and every neighbor list
    ``column_indices[row_offsets[v]:row_offsets[v + 1]]`` is strictly ascending.
    An undirected graph stores both half-edges; an oriented graph stores each
    edge once, pointing from lower to higher (degree, id) rank.
    """

    row_offsets: np.ndarray
    column_indices: np.ndarray
    labels: np.ndarray | None = None
    is_oriented: bool = False
    original_ids: np.ndarray | None = None
    label_names: tuple | None = None
    _csr: CSR = field(init=False, repr=False)

    def __post_init__(self):
        rp = np.ascontiguousarray(self.row_offsets, dtype=np.int64)
        ci = np.ascontiguousarray(self.column_indices, dtype=np.int32)
        object.__setattr__(self, "row_offsets", rp)
        object.__setattr__(self, "column_indices", ci)
        if self.labels is not None:
            lab = np.ascontiguousarray(self.labels, dtype=np.int32)
            if lab.shape[0] != rp.shape[0] - 1:
                raise ValueError("labels must have one entry per vertex")
            object.__setattr__(self, "labels", lab)
        lab_view = self.labels if self.labels is not None else np.empty(0, np.int32)
        object.__setattr__(self, "_csr", CSR(rp, ci, lab_view, bool(self.is_oriented)))

    @property
    def num_vertices(self) -> int:
        return self.row_offsets.shape[0] - 1

    @property
    def num_edges(self) -> int:
        """Number of stored (half-)edges."""
        return int(self.row_offsets[-1])

    @property
    def num_undirected_edges(self) -> int:
        return self.num_edges if self.is_oriented else self.num_edges // 2

    @property
    def is_labeled(self) -> bool:
        return self.labels is not None

    @property
    def csr(self) -> CSR:
        return self._csr

    def degrees(self) -> np.ndarray:
        return np.diff(self.row_offsets)

    def neighbors(self, v: int) -> np.ndarray:
        return self.column_indices[self.row_offsets[v]:self.row_offsets[v + 1]]

    def edges(self) -> np.ndarray:
        """(m, 2) array of stored edges; undirected graphs report each edge once with u < v."""
        src = np.repeat(np.arange(self.num_vertices, dtype=np.int64), self.degrees())
        dst = self.column_indices.astype(np.int64)
        if not self.is_oriented:
            keep = src < dst
            src, dst = src[keep], dst[keep]
        return np.stack([src, dst], axis=1)

    def relabeled(self, perm: np.ndarray) -> "Graph":
        """Copy of this graph with vertex ``v`` renamed ``perm[v]``."""
        if self.is_oriented:
            raise ValueError("relabel the undirected graph, then orient it")
        perm = np.asarray(perm, dtype=np.int64)
        e = self.edges()
        labels = None
        if self.labels is not None:
            labels = np.empty_like(self.labels)
            labels[perm] = self.labels
        return from_edges(perm[e], self.num_vertices, labels=labels)


def from_edges(edges, num_vertices: int | None = None, labels=None) -> Graph:
    """Build a cleaned undirected graph: symmetric, no self-loops, no duplicates."""
    e = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    if e.size and e.min() < 0:
        raise ValueError("vertex ids must be non-negative")
    if num_vertices is None:
        num_vertices = int(e.max()) + 1 if e.size else 0
    e = e[e[:, 0] != e[:, 1]]
    both = np.concatenate([e, e[:, ::-1]])
    keys = np.unique(both[:, 0] * num_vertices + both[:, 1])
    src, dst = keys // num_vertices, keys % num_vertices
    row_offsets = np.zeros(num_vertices + 1, dtype=np.int64)
    np.cumsum(np.bincount(src, minlength=num_vertices), out=row_offsets[1:])
    return Graph(row_offsets, dst, labels=labels)


def _lines(source: Source) -> Iterable[str]:
    if isinstance(source, (str, os.PathLike)):
        with open(source, "r", encoding="utf-8", newline=None) as fh:
            yield from fh
    elif isinstance(source, io.IOBase) or hasattr(source, "read"):
        yield from source
    else:
        yield from source


def _is_comment(s: str) -> bool:
    return not s or s[0] in "#%"


def load_edge_list(source: Source) -> Graph:
    """Parse "u v" lines into an undirected graph; gaps in ids are compacted.

    The compacted graph keeps ``original_ids[new] == old``.
    """
    pairs = []
    for lineno, raw in enumerate(_lines(source), start=1):
        s = raw.strip()
        if _is_comment(s):
            continue
        parts = s.split()
        if len(parts) < 2:
            raise GraphFormatError(f"expected two vertex ids, got {s!r}", lineno)
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise GraphFormatError(f"non-integer vertex id in {s!r}", lineno) from None
        if u < 0 or v < 0:
            raise GraphFormatError("negative vertex id", lineno)
        pairs.append((u, v))
    e = np.array(pairs, dtype=np.int64).reshape(-1, 2)
    if not (e[:, 0] != e[:, 1]).any():
        raise GraphFormatError("edge set is empty")
    ids, compact = np.unique(e, return_inverse=True)
    g = from_edges(compact.reshape(-1, 2), len(ids))
    return Graph(g.row_offsets, g.column_indices, original_ids=ids)


def load_labeled_graph(source: Source) -> Graph:
    """Parse the gSpan-style ``v <id> <label>`` / ``e <u> <v> [elabel]`` format.

    Integer labels are kept as-is; if any label is not an integer, all labels
    are interned to 0, 1, ... in order of first appearance.
    """
    vlabels: dict[int, str] = {}
    edges = []
    graphs_seen = 0
    for lineno, raw in enumerate(_lines(source), start=1):
        s = raw.strip()
        if _is_comment(s):
            continue
        parts = s.split()
        tag = parts[0]
        try:
            if tag == "t":
                graphs_seen += 1
                if graphs_seen > 1:
                    raise GraphFormatError("only a single graph per file is supported", lineno)
            elif tag == "v":
                if len(parts) < 3:
                    raise GraphFormatError("vertex line needs an id and a label", lineno)
                vid = int(parts[1])
                if vid < 0:
                    raise GraphFormatError("negative vertex id", lineno)
                if vid in vlabels:
                    raise GraphFormatError(f"vertex {vid} declared twice", lineno)
                vlabels[vid] = parts[2]
            elif tag == "e":
                if len(parts) < 3:
                    raise GraphFormatError("edge line needs two vertex ids", lineno)
                u, v = int(parts[1]), int(parts[2])
                for x in (u, v):
                    if x not in vlabels:
                        raise GraphFormatError(f"undeclared vertex {x}", lineno)
                edges.append((u, v))
            else:
                raise GraphFormatError(f"unknown record type {tag!r}", lineno)
        except ValueError as exc:
            if isinstance(exc, GraphFormatError):
                raise
            raise GraphFormatError(f"non-integer id in {s!r}", lineno) from None
    if not vlabels:
        raise GraphFormatError("no vertices declared")
    ids = np.array(sorted(vlabels), dtype=np.int64)
    raw_labels = [vlabels[int(i)] for i in ids]
    names = None
    try:
        lab = np.array([int(x) for x in raw_labels], dtype=np.int64)
        if lab.min() < 0:
            raise ValueError
    except ValueError:
        order: dict[str, int] = {}
        for vid in vlabels:  # declaration order
            order.setdefault(vlabels[vid], len(order))
        lab = np.array([order[x] for x in raw_labels], dtype=np.int64)
        names = tuple(order)
    e = np.array(edges, dtype=np.int64).reshape(-1, 2)
    compact = np.searchsorted(ids, e)
    g = from_edges(compact, len(ids))
    return Graph(g.row_offsets, g.column_indices, labels=lab, original_ids=ids, label_names=names)


def write_edge_list(g: Graph, out: TextIO) -> None:
    ids = g.original_ids if g.original_ids is not None else np.arange(g.num_vertices)
    for u, v in g.edges():
        out.write(f"{ids[u]} {ids[v]}\n")


def write_labeled_graph(g: Graph, out: TextIO) -> None:
    if g.labels is None:
        raise ValueError("graph has no labels")
    ids = g.original_ids if g.original_ids is not None else np.arange(g.num_vertices)
    out.write("t # 0\n")
    for v in range(g.num_vertices):
        lab = g.labels[v] if g.label_names is None else g.label_names[g.labels[v]]
        out.write(f"v {ids[v]} {lab}\n")
    for u, v in g.edges():
        out.write(f"e {ids[u]} {ids[v]}\n")


def orient_dag(g: Graph) -> Graph:
    """Keep each undirected edge once, pointing toward higher degree (ties: higher id)."""
    if g.is_oriented:
        raise ValueError("graph is already oriented")
    deg = g.degrees()
    src = np.repeat(np.arange(g.num_vertices, dtype=np.int64), deg)
    dst = g.column_indices.astype(np.int64)
    keep = (deg[src] < deg[dst]) | ((deg[src] == deg[dst]) & (src < dst))
    src, dst = src[keep], dst[keep]
    row_offsets = np.zeros(g.num_vertices + 1, dtype=np.int64)
    np.cumsum(np.bincount(src, minlength=g.num_vertices), out=row_offsets[1:])
    # src is non-decreasing and each row was sorted, so filtered rows stay sorted
    return Graph(row_offsets, dst, labels=g.labels, is_oriented=True,
                 original_ids=g.original_ids, label_names=g.label_names)


@njit(nogil=True, cache=True)
def connected(g, u, v):
    """Binary search for ``v`` in the neighbor list of ``u``."""
    lo = g.row_offsets[u]
    hi = g.row_offsets[u + 1]
    col = g.column_indices
    while lo < hi:
        mid = (lo + hi) >> 1
        x = col[mid]
        if x == v:
            return True
        if x < v:
            lo = mid + 1
        else:
            hi = mid
    return False


@njit(nogil=True, cache=True)
def adjacent(g, u, v):
    # oriented graphs store one direction per edge
    if g.oriented:
        return connected(g, u, v) or connected(g, v, u)
    return connected(g, u, v)


def is_connected(g: Graph, u: int, v: int) -> bool:
    """True iff ``v`` is in N(u); on an oriented graph this is the edge u -> v."""
    n = g.num_vertices
    if not (0 <= u < n and 0 <= v < n):
        raise IndexError(f"vertex id out of range [0, {n})")
    return bool(connected(g.csr, u, v))
