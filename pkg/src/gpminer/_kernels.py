"""Per-range compute kernels for the engine.

Each kernel processes worklist entries ``lo <= i < hi`` so that disjoint
ranges can run concurrently on different threads (all kernels release the
GIL). Extension kernels run twice over the same range: once with
``write=False`` to fill ``counts[i]``, and once with ``write=True`` to emit
children starting at ``offsets[i]``.

Callbacks are passed as arguments. Jitted callbacks give compiled
specializations; the ``.py_func`` of a kernel runs with plain Python ones.
Kernels that take callbacks are not disk-cached: numba cannot reliably
re-serialize a cache index whose signatures hold function types from an
earlier process, so they compile once per process instead.
"""
import numpy as np
from numba import njit

from .graph import adjacent, connected


@njit(nogil=True, cache=True)
def load_vertex(idx_levels, vid_levels, level, pos, emb):
    p = pos
    for l in range(level, 0, -1):
        emb[l] = vid_levels[l - 1][p]
        p = idx_levels[l - 1][p]
    emb[0] = p


@njit(nogil=True, cache=True)
def load_edge(idx_levels, vid_levels, his_levels, level, pos, chain, hs, verts, vlev, esrc, edst):
    """Rebuild an edge-induced embedding; returns its number of distinct vertices.

    ``verts[:nv]`` holds distinct vertices in first-appearance order and
    ``vlev[q]`` the level at which ``verts[q]`` first appears. Edge ``j`` is
    ``(verts[esrc[j]], verts[edst[j]])``.
    """
    p = pos
    for l in range(level, 0, -1):
        chain[l] = vid_levels[l - 1][p]
        hs[l] = his_levels[l - 1][p]
        p = idx_levels[l - 1][p]
    chain[0] = p
    nv = 0
    lpos = np.empty(level + 1, np.int64)
    for l in range(level + 1):
        x = chain[l]
        found = -1
        for q in range(nv):
            if verts[q] == x:
                found = q
                break
        if found < 0:
            verts[nv] = x
            vlev[nv] = l
            found = nv
            nv += 1
        lpos[l] = found
    for l in range(1, level + 1):
        esrc[l - 1] = lpos[hs[l]]
        edst[l - 1] = lpos[l]
    return nv


@njit(nogil=True)
def vertex_extend(g, idx_levels, vid_levels, level, lo, hi, to_extend, to_add,
                  write, offsets, out_idx, out_vid, counts):
    n = level + 1
    emb = np.empty(n, np.int64)
    ext = np.empty(n, np.bool_)
    rp = g.row_offsets
    col = g.column_indices
    for i in range(lo, hi):
        load_vertex(idx_levels, vid_levels, level, i, emb)
        for p in range(n):
            ext[p] = to_extend(g, emb, n, p)
        c = 0
        w = offsets[i] if write else 0
        for p in range(n):
            if not ext[p]:
                continue
            v = emb[p]
            for j in range(rp[v], rp[v + 1]):
                u = col[j]
                skip = False
                for q in range(n):
                    if emb[q] == u:
                        skip = True
                        break
                if skip:
                    continue
                # a candidate reachable from an earlier extended position is emitted there
                for q in range(p):
                    if ext[q] and connected(g, emb[q], u):
                        skip = True
                        break
                if skip:
                    continue
                if to_add(g, emb, n, p, u):
                    if write:
                        out_idx[w] = i
                        out_vid[w] = u
                        w += 1
                    c += 1
        if not write:
            counts[i] = c


@njit(nogil=True)
def edge_extend(g, idx_levels, vid_levels, his_levels, level, lo, hi, to_extend, to_add,
                write, offsets, out_idx, out_vid, out_his, counts):
    ne = level
    chain = np.empty(level + 1, np.int64)
    hs = np.empty(level + 1, np.int64)
    verts = np.empty(level + 1, np.int64)
    vlev = np.empty(level + 1, np.int64)
    esrc = np.empty(level, np.int64)
    edst = np.empty(level, np.int64)
    ext = np.empty(level + 1, np.bool_)
    rp = g.row_offsets
    col = g.column_indices
    for i in range(lo, hi):
        nv = load_edge(idx_levels, vid_levels, his_levels, level, i, chain, hs, verts, vlev, esrc, edst)
        for p in range(nv):
            ext[p] = to_extend(g, verts, nv, p)
        c = 0
        w = offsets[i] if write else 0
        for p in range(nv):
            if not ext[p]:
                continue
            v = verts[p]
            for j in range(rp[v], rp[v + 1]):
                u = col[j]
                q = -1
                for t in range(nv):
                    if verts[t] == u:
                        q = t
                        break
                if q >= 0:
                    # closing edge: emit from the earlier extended endpoint only
                    if q < p and ext[q]:
                        continue
                    present = False
                    for t in range(ne):
                        if (esrc[t] == p and edst[t] == q) or (esrc[t] == q and edst[t] == p):
                            present = True
                            break
                    if present:
                        continue
                if to_add(g, verts, nv, esrc, edst, ne, p, u):
                    if write:
                        out_idx[w] = i
                        out_vid[w] = u
                        out_his[w] = vlev[p]
                        w += 1
                    c += 1
        if not write:
            counts[i] = c


@njit(nogil=True, cache=True)
def vertex_codes(g, idx_levels, vid_levels, level, lo, hi, out):
    """Adjacency bitmask over position pairs (bit j*(j-1)/2 + i for i < j)."""
    n = level + 1
    emb = np.empty(n, np.int64)
    for i in range(lo, hi):
        load_vertex(idx_levels, vid_levels, level, i, emb)
        bits = 0
        for j in range(1, n):
            for q in range(j):
                if adjacent(g, emb[q], emb[j]):
                    bits |= 1 << (j * (j - 1) // 2 + q)
        out[i] = bits


@njit(nogil=True, cache=True)
def edge_codes(g, idx_levels, vid_levels, his_levels, level, lo, hi, out, out_verts):
    """``out[i] = nv << 32 | bits``; ``out_verts[i, :nv]`` are the distinct vertices, rest -1."""
    chain = np.empty(level + 1, np.int64)
    hs = np.empty(level + 1, np.int64)
    verts = np.empty(level + 1, np.int64)
    vlev = np.empty(level + 1, np.int64)
    esrc = np.empty(level, np.int64)
    edst = np.empty(level, np.int64)
    for i in range(lo, hi):
        nv = load_edge(idx_levels, vid_levels, his_levels, level, i, chain, hs, verts, vlev, esrc, edst)
        bits = 0
        for t in range(level):
            a = min(esrc[t], edst[t])
            b = max(esrc[t], edst[t])
            bits |= 1 << (b * (b - 1) // 2 + a)
        out[i] = (nv << 32) | bits
        for q in range(level + 1):
            out_verts[i, q] = verts[q] if q < nv else -1


@njit(nogil=True)
def vertex_pids(g, idx_levels, vid_levels, level, lo, hi, parent_pids, get_pattern, out):
    n = level + 1
    emb = np.empty(n, np.int64)
    for i in range(lo, hi):
        load_vertex(idx_levels, vid_levels, level, i, emb)
        parent = parent_pids[idx_levels[level - 1][i]] if level > 1 else -1
        out[i] = get_pattern(g, emb, n, parent)


@njit(nogil=True)
def edge_pids(g, idx_levels, vid_levels, his_levels, level, lo, hi, parent_pids, get_pattern, out):
    chain = np.empty(level + 1, np.int64)
    hs = np.empty(level + 1, np.int64)
    verts = np.empty(level + 1, np.int64)
    vlev = np.empty(level + 1, np.int64)
    esrc = np.empty(level, np.int64)
    edst = np.empty(level, np.int64)
    for i in range(lo, hi):
        nv = load_edge(idx_levels, vid_levels, his_levels, level, i, chain, hs, verts, vlev, esrc, edst)
        parent = parent_pids[idx_levels[level - 1][i]] if level > 1 else -1
        out[i] = get_pattern(g, verts, nv, parent)


@njit(nogil=True)
def vertex_extend_classify(g, idx_levels, vid_levels, level, lo, hi, to_extend, to_add,
                           parent_pids, get_pattern, hist):
    """Final-level extension fused with the memoized classifier.

    Children are classified as they are accepted and tallied into
    ``hist[pattern id]`` instead of being written out.
    """
    n = level + 1
    emb = np.empty(n, np.int64)
    child = np.empty(n + 1, np.int64)
    ext = np.empty(n, np.bool_)
    rp = g.row_offsets
    col = g.column_indices
    for i in range(lo, hi):
        load_vertex(idx_levels, vid_levels, level, i, emb)
        parent = parent_pids[i]
        for p in range(n):
            ext[p] = to_extend(g, emb, n, p)
            child[p] = emb[p]
        for p in range(n):
            if not ext[p]:
                continue
            v = emb[p]
            for j in range(rp[v], rp[v + 1]):
                u = col[j]
                skip = False
                for q in range(n):
                    if emb[q] == u:
                        skip = True
                        break
                if skip:
                    continue
                for q in range(p):
                    if ext[q] and connected(g, emb[q], u):
                        skip = True
                        break
                if skip:
                    continue
                if to_add(g, emb, n, p, u):
                    child[n] = u
                    hist[get_pattern(g, child, n + 1, parent)] += 1
