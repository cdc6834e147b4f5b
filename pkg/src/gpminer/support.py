"""Pattern support measures: plain counts and minimum image-based (domain) support.

Domain support keeps one set of graph vertices per canonical pattern position.
The MNI value is the size of the smallest set. Two mapping policies exist:

* ``"canonical"``: every embedding contributes through the single position
  map returned by canonicalization of its quick pattern.
* ``"orbit"``: positions in the same automorphism orbit share their images.
  This is the usual MNI over all isomorphisms and is anti-monotone.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Sequence

import numpy as np

from .embedding import Embedding
from .pattern import CanonicalPattern, PositionMap, orbits

__all__ = [
    "DomainSupport",
    "domain_support",
    "merge_domain",
    "mni",
    "orbit_mni",
    "CountSupportKind",
    "DomainSupportKind",
    "COUNT",
]


@dataclass(frozen=True)
class DomainSupport:
    domains: tuple[frozenset, ...]

    @classmethod
    def empty(cls, n: int) -> "DomainSupport":
        return cls(tuple(frozenset() for _ in range(n)))

    def __len__(self) -> int:
        return len(self.domains)

    def sizes(self) -> tuple[int, ...]:
        return tuple(len(d) for d in self.domains)


def domain_support(emb: Embedding | Sequence[int], pm: PositionMap) -> DomainSupport:
    verts = emb.vertices if isinstance(emb, Embedding) else tuple(emb)
    if len(verts) != len(pm.perm):
        raise ValueError(f"embedding has {len(verts)} vertices, position map {len(pm.perm)}")
    domains: list = [None] * len(verts)
    for i, v in enumerate(verts):
        domains[pm.perm[i]] = frozenset((int(v),))
    return DomainSupport(tuple(domains))


def merge_domain(a: DomainSupport, b: DomainSupport) -> DomainSupport:
    if len(a) != len(b):
        raise ValueError(f"cannot merge supports with {len(a)} and {len(b)} domains")
    return DomainSupport(tuple(x | y for x, y in zip(a.domains, b.domains)))


def mni(s: DomainSupport) -> int:
    if not s.domains:
        raise ValueError("support has no domains")
    return min(len(d) for d in s.domains)


def orbit_mni(s: DomainSupport, pattern: CanonicalPattern) -> int:
    """MNI after pooling the domains of automorphic positions."""
    return min(len(frozenset().union(*(s.domains[i] for i in orb))) for orb in orbits(pattern))


class CountSupportKind:
    """Support is the number of embeddings; aggregation is addition."""

    name = "count"

    def of_embedding(self, vertices, pm: PositionMap | None = None) -> int:
        return 1

    def of_group(self, vertices: np.ndarray, pm: PositionMap | None = None) -> int:
        return int(vertices.shape[0])

    def of_count(self, n: int) -> int:
        return int(n)

    def identity(self, n: int = 0) -> int:
        return 0

    def aggregate(self, a: int, b: int) -> int:
        return a + b

    def value(self, s: int, pattern: CanonicalPattern | None = None) -> int:
        return int(s)


class DomainSupportKind:
    """Domain support; ``mapping`` is ``"canonical"`` or ``"orbit"`` (see module doc)."""

    name = "domain"

    def __init__(self, mapping: str = "canonical"):
        if mapping not in ("canonical", "orbit"):
            raise ValueError(f"unknown mapping {mapping!r}")
        self.mapping = mapping

    def of_embedding(self, vertices, pm: PositionMap) -> DomainSupport:
        return domain_support(vertices, pm)

    def of_group(self, vertices: np.ndarray, pm: PositionMap) -> DomainSupport:
        """Fold of ``of_embedding`` over a (m, n) block of same-quick-pattern embeddings."""
        n = len(pm.perm)
        domains: list = [None] * n
        for i in range(n):
            domains[pm.perm[i]] = frozenset(np.unique(vertices[:, i]).tolist())
        return DomainSupport(tuple(domains))

    def identity(self, n: int) -> DomainSupport:
        return DomainSupport.empty(n)

    def aggregate(self, a: DomainSupport, b: DomainSupport) -> DomainSupport:
        return merge_domain(a, b)

    def value(self, s: DomainSupport, pattern: CanonicalPattern | None = None) -> int:
        if self.mapping == "orbit":
            if pattern is None:
                raise ValueError("orbit MNI needs the pattern")
            return orbit_mni(s, pattern)
        return mni(s)

    def fold(self, supports) -> DomainSupport:
        return reduce(merge_domain, supports)


COUNT = CountSupportKind()
