"""Pattern encodings, canonical labeling and the canonicality tests used during extension.

A pattern is encoded by its per-position labels and the sorted list of
position pairs that are adjacent. The canonical form is the lexicographically
smallest ``(labels, degrees, edges)`` encoding over all vertex permutations.
Placing the within-pattern degree sequence between labels and edges lets the
search only permute vertices inside (label, degree) cells. Patterns are
capped at ``MAX_PATTERN_VERTICES`` vertices, which keeps the search to at
most 8! permutations.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np
from numba import njit

from .embedding import Embedding
from .graph import Graph, adjacent

__all__ = [
    "MAX_PATTERN_VERTICES",
    "NO_LABEL",
    "QuickPattern",
    "CanonicalPattern",
    "PositionMap",
    "quick_pattern",
    "canonicalize",
    "automorphisms",
    "orbits",
    "pair_bit",
    "quick_from_code",
    "is_auto_canonical_vertex",
    "is_auto_canonical_edge",
    "classify_3_vertex",
    "motif_pattern_table",
    "TRIANGLE",
    "WEDGE",
]

MAX_PATTERN_VERTICES = 8
NO_LABEL = -1


@dataclass(frozen=True, order=True)
class QuickPattern:
    """Embedding structure in insertion order; equal quick patterns are isomorphic."""

    num_vertices: int
    labels: tuple[int, ...]
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if len(self.labels) != self.num_vertices:
            raise ValueError("one label per position required")

    @classmethod
    def build(cls, num_vertices: int, edges, labels=None) -> "QuickPattern":
        norm = sorted({(min(i, j), max(i, j)) for i, j in edges})
        if any(i == j for i, j in norm):
            raise ValueError("self-loop in pattern")
        labs = tuple(int(x) for x in labels) if labels is not None else (NO_LABEL,) * num_vertices
        return cls(num_vertices, labs, tuple(norm))

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def degrees(self) -> list[int]:
        deg = [0] * self.num_vertices
        for i, j in self.edges:
            deg[i] += 1
            deg[j] += 1
        return deg

    def permuted(self, perm: Sequence[int]) -> "QuickPattern":
        """Move position ``i`` to ``perm[i]``."""
        labels = [0] * self.num_vertices
        for i, p in enumerate(perm):
            labels[p] = self.labels[i]
        return QuickPattern.build(self.num_vertices, [(perm[i], perm[j]) for i, j in self.edges], labels)


@dataclass(frozen=True, order=True)
class CanonicalPattern(QuickPattern):
    """A quick pattern already in canonical position order; used as pattern-map key."""

    def to_text(self) -> str:
        labs = ",".join(str(x) for x in self.labels)
        edges = "".join(f"({i},{j})" for i, j in self.edges)
        return f"k={self.num_vertices};L={labs};E={edges}"

    __str__ = to_text

    @classmethod
    def from_text(cls, text: str) -> "CanonicalPattern":
        m = re.fullmatch(r"k=(\d+);L=([-\d,]*);E=((?:\(\d+,\d+\))*)", text.strip())
        if m is None:
            raise ValueError(f"bad pattern text {text!r}")
        n = int(m.group(1))
        labels = tuple(int(x) for x in m.group(2).split(",")) if m.group(2) else ()
        edges = tuple((int(a), int(b)) for a, b in re.findall(r"\((\d+),(\d+)\)", m.group(3)))
        return cls(n, labels, edges)


@dataclass(frozen=True)
class PositionMap:
    """``perm[i]`` is the canonical position of quick-pattern position ``i``."""

    perm: tuple[int, ...]

    def __post_init__(self):
        if sorted(self.perm) != list(range(len(self.perm))):
            raise ValueError("perm must be a bijection")

    def apply(self, qp: QuickPattern) -> CanonicalPattern:
        p = qp.permuted(self.perm)
        return CanonicalPattern(p.num_vertices, p.labels, p.edges)


def quick_pattern(emb: Embedding, g: Graph) -> QuickPattern:
    """Vertex mode: all graph edges among the vertices; edge mode: exactly the embedding's edges."""
    verts = emb.vertices
    labels = [int(g.labels[v]) for v in verts] if g.labels is not None else None
    if emb.edges is None:
        csr = g.csr
        edges = [(i, j) for j in range(len(verts)) for i in range(j)
                 if adjacent(csr, verts[i], verts[j])]
    else:
        pos = {v: i for i, v in enumerate(verts)}
        edges = [(p, pos[v]) for p, v in emb.edges]
    return QuickPattern.build(len(verts), edges, labels)


def _encoding(qp: QuickPattern, perm: Sequence[int]) -> tuple:
    return tuple(sorted((perm[i], perm[j]) if perm[i] < perm[j] else (perm[j], perm[i])
                        for i, j in qp.edges))


@lru_cache(maxsize=1 << 16)
def canonicalize(qp: QuickPattern) -> tuple[CanonicalPattern, PositionMap]:
    """Canonical form and the lexicographically smallest permutation reaching it."""
    n = qp.num_vertices
    if n > MAX_PATTERN_VERTICES:
        raise ValueError(f"pattern has {n} vertices; canonicalization is capped at {MAX_PATTERN_VERTICES}")
    deg = qp.degrees()
    keys = sorted(set(zip(qp.labels, deg)))
    cells = [[i for i in range(n) if (qp.labels[i], deg[i]) == k] for k in keys]
    starts = list(itertools.accumulate([0] + [len(c) for c in cells]))
    best = None
    best_perm = None
    for choice in itertools.product(*(itertools.permutations(c) for c in cells)):
        perm = [0] * n
        for cell_start, order in zip(starts, choice):
            for offset, v in enumerate(order):
                perm[v] = cell_start + offset
        enc = _encoding(qp, perm)
        t = tuple(perm)
        if best is None or enc < best or (enc == best and t < best_perm):
            best, best_perm = enc, t
    pm = PositionMap(best_perm)
    return pm.apply(qp), pm


@lru_cache(maxsize=4096)
def automorphisms(cp: CanonicalPattern) -> tuple[tuple[int, ...], ...]:
    """All position permutations that leave ``cp`` unchanged."""
    n = cp.num_vertices
    deg = cp.degrees()
    target = cp.edges
    out = []
    for perm in itertools.permutations(range(n)):
        if any(cp.labels[i] != cp.labels[perm[i]] or deg[i] != deg[perm[i]] for i in range(n)):
            continue
        if _encoding(cp, perm) == target:
            out.append(perm)
    return tuple(out)


def orbits(cp: CanonicalPattern) -> list[list[int]]:
    """Partition of positions into automorphism orbits."""
    seen: set[int] = set()
    out = []
    auts = automorphisms(cp)
    for i in range(cp.num_vertices):
        if i in seen:
            continue
        orb = sorted({a[i] for a in auts})
        seen.update(orb)
        out.append(orb)
    return out


def pair_bit(i: int, j: int) -> int:
    """Bit index of position pair (i, j), i < j, in an adjacency code."""
    return j * (j - 1) // 2 + i


def quick_from_code(num_vertices: int, bits: int, labels=None) -> QuickPattern:
    edges = [(i, j) for j in range(num_vertices) for i in range(j) if bits >> pair_bit(i, j) & 1]
    return QuickPattern.build(num_vertices, edges, labels)


# Extension callbacks (jitted; a Python callback with the same signature also works).
# Vertex mode: (g, emb, n, src, u) where emb[:n] are the embedding's vertices and
# src is the position being extended. Edge mode additionally gets the edge list
# as position pairs: (g, verts, nv, esrc, edst, ne, src, u).

@njit(nogil=True, cache=True)
def extend_all(g, emb, n, pos):
    return True


@njit(nogil=True, cache=True)
def extend_last(g, emb, n, pos):
    return pos == n - 1


@njit(nogil=True, cache=True)
def auto_canonical_vertex(g, emb, n, src, u):
    """Appending ``u`` keeps ``emb`` in canonical generation order.

    The generation order of a vertex set starts at its minimum vertex and
    repeatedly appends the smallest unchosen vertex adjacent to a chosen one.
    """
    if u <= emb[0]:
        return False
    first = -1
    for i in range(n):
        if emb[i] == u:
            return False
        if first < 0 and adjacent(g, emb[i], u):
            first = i
    if first < 0:
        return False
    for t in range(first + 1, n):
        if emb[t] > u:
            return False
    return True


@njit(nogil=True, cache=True)
def _edge_less(a0, a1, b0, b1):
    return a0 < b0 or (a0 == b0 and a1 < b1)


@njit(nogil=True, cache=True)
def auto_canonical_edge(g, verts, nv, esrc, edst, ne, src, u):
    """Appending edge (verts[src], u) keeps the edge sequence in canonical order.

    Edges compare as (min id, max id) pairs. The generation order of an edge
    set starts at its minimum edge and repeatedly appends the smallest unused
    edge touching the vertices covered so far.
    """
    a = verts[src]
    lo = min(a, u)
    hi = max(a, u)
    q = -1
    for i in range(nv):
        if verts[i] == u:
            q = i
    for j in range(ne):
        x = verts[esrc[j]]
        y = verts[edst[j]]
        if min(x, y) == lo and max(x, y) == hi:
            return False
    x = verts[esrc[0]]
    y = verts[edst[0]]
    if not _edge_less(min(x, y), max(x, y), lo, hi):
        return False
    # step (1-based edge count) after which the new edge became a candidate
    first = ne + 1
    for j in range(ne):
        s = esrc[j]
        d = edst[j]
        if s == src or d == src or (q >= 0 and (s == q or d == q)):
            first = j + 1
            break
    for j in range(first, ne):
        x = verts[esrc[j]]
        y = verts[edst[j]]
        if _edge_less(lo, hi, min(x, y), max(x, y)):
            return False
    return True


def is_auto_canonical_vertex(g: Graph, emb: Embedding | Sequence[int], u: int) -> bool:
    verts = emb.vertices if isinstance(emb, Embedding) else tuple(emb)
    arr = np.asarray(verts, dtype=np.int64)
    return bool(auto_canonical_vertex(g.csr, arr, len(arr), len(arr) - 1, u))


def is_auto_canonical_edge(g: Graph, emb: Embedding, e: tuple[int, int]) -> bool:
    """``e`` must share an endpoint with ``emb``; it is extended from the earlier endpoint."""
    verts = list(emb.vertices)
    pos = {v: i for i, v in enumerate(verts)}
    ends = [(pos[x], y) for x, y in (e, e[::-1]) if x in pos]
    if not ends:
        raise ValueError("candidate edge does not touch the embedding")
    src, u = min(ends)
    esrc = np.array([p for p, _ in emb.edges], dtype=np.int64)
    edst = np.array([pos[v] for _, v in emb.edges], dtype=np.int64)
    return bool(auto_canonical_edge(g.csr, np.asarray(verts, dtype=np.int64), len(verts),
                                    esrc, edst, len(esrc), src, u))


# Customized motif classification -------------------------------------------------

# Memoized ids: 0 single edge; 1 triangle; 2 + c wedge centred at position c;
# 10..15 the six connected 4-vertex motifs.
PID_EDGE = 0
PID_TRIANGLE = 1
PID_WEDGE = 2
PID_4PATH, PID_3STAR, PID_4CYCLE, PID_TAILED, PID_DIAMOND, PID_4CLIQUE = 10, 11, 12, 13, 14, 15

TRIANGLE = canonicalize(QuickPattern.build(3, [(0, 1), (0, 2), (1, 2)]))[0]
WEDGE = canonicalize(QuickPattern.build(3, [(0, 1), (1, 2)]))[0]


def motif_pattern_table() -> dict[int, CanonicalPattern]:
    reps = {
        PID_EDGE: [(0, 1)],
        PID_4PATH: [(0, 1), (1, 2), (2, 3)],
        PID_3STAR: [(0, 1), (0, 2), (0, 3)],
        PID_4CYCLE: [(0, 1), (1, 2), (2, 3), (0, 3)],
        PID_TAILED: [(0, 1), (0, 2), (1, 2), (2, 3)],
        PID_DIAMOND: [(0, 1), (0, 2), (1, 2), (1, 3), (2, 3)],
        PID_4CLIQUE: [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)],
    }
    table = {pid: canonicalize(QuickPattern.build(2 if pid == PID_EDGE else 4, e))[0]
             for pid, e in reps.items()}
    table[PID_TRIANGLE] = TRIANGLE
    for c in range(3):
        table[PID_WEDGE + c] = WEDGE
    return table


@njit(nogil=True, cache=True)
def _classify3(g, emb):
    a01 = adjacent(g, emb[0], emb[1])
    a02 = adjacent(g, emb[0], emb[2])
    a12 = adjacent(g, emb[1], emb[2])
    if a01 and a02 and a12:
        return PID_TRIANGLE
    if a01 and a02:
        return PID_WEDGE
    if a01 and a12:
        return PID_WEDGE + 1
    return PID_WEDGE + 2


@njit(nogil=True, cache=True)
def motif_pid(g, emb, n, parent_pid):
    """Pattern id of a connected 3- or 4-vertex embedding.

    The 4-vertex case only inspects the new vertex's adjacency to the three
    earlier positions, reusing the parent's memoized id.
    """
    if n == 2:
        return PID_EDGE
    if n == 3:
        return _classify3(g, emb)
    w = emb[3]
    b0 = adjacent(g, emb[0], w)
    b1 = adjacent(g, emb[1], w)
    b2 = adjacent(g, emb[2], w)
    c = int(b0) + int(b1) + int(b2)
    if parent_pid == PID_TRIANGLE:
        if c == 1:
            return PID_TAILED
        if c == 2:
            return PID_DIAMOND
        return PID_4CLIQUE
    centre = parent_pid - PID_WEDGE
    to_centre = (centre == 0 and b0) or (centre == 1 and b1) or (centre == 2 and b2)
    if c == 1:
        return PID_3STAR if to_centre else PID_4PATH
    if c == 2:
        return PID_TAILED if to_centre else PID_4CYCLE
    return PID_DIAMOND


def classify_3_vertex(emb: Embedding, g: Graph) -> CanonicalPattern:
    """Triangle if the three vertices induce three edges, otherwise wedge."""
    if len(emb.vertices) != 3:
        raise ValueError("classify_3_vertex needs a 3-vertex embedding")
    pid = _classify3(g.csr, np.asarray(emb.vertices, dtype=np.int64))
    return TRIANGLE if pid == PID_TRIANGLE else WEDGE
