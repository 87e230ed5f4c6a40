"""k-partite realisations of a pattern k-graph and the gcd of its class sizes."""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from math import gcd

from .core import Hypergraph


class NotPartiteError(ValueError):
    pass


@dataclass(frozen=True, order=True)
class Realisation:
    """Partition of V(F) into k classes, each edge meeting every class once.

    Classes are stored sorted by their smallest vertex, so class
    permutations of the same partition compare equal.
    """

    classes: tuple[tuple[int, ...], ...]

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(len(c) for c in self.classes)

    def colouring(self) -> tuple[int, ...]:
        n = sum(self.sizes)
        col = [0] * n
        for i, cls in enumerate(self.classes):
            for v in cls:
                col[v] = i
        return tuple(col)


def realisations(F: Hypergraph) -> list[Realisation]:
    """All k-partite realisations of F up to permutation of the classes.

    Vertices are coloured 0, 1, ... in order with restricted growth (a new
    colour is only opened as the next unused index), which lists every
    unordered partition exactly once.  An edge is rejected as soon as two of
    its coloured vertices share a colour.
    """
    k, n = F.k, F.n
    if n < k:
        return []
    incident: list[list[tuple[int, ...]]] = [[] for _ in range(n)]
    for e in F.edges:
        for v in e:
            # only look back at vertices coloured before v
            incident[v].append(tuple(u for u in e if u < v))
    colour = [-1] * n
    out: list[Realisation] = []

    def extend(v: int, used: int) -> None:
        if n - v < k - used:
            return  # not enough vertices left to open the missing classes
        if v == n:
            classes = [[] for _ in range(k)]
            for u, c in enumerate(colour):
                classes[c].append(u)
            out.append(Realisation(tuple(tuple(c) for c in classes)))
            return
        for c in range(min(used + 1, k)):
            if all(colour[u] != c for earlier in incident[v] for u in earlier):
                colour[v] = c
                extend(v + 1, max(used, c + 1))
        colour[v] = -1

    extend(0, 0)
    return sorted(out)


def is_kpartite(F: Hypergraph) -> bool:
    return bool(realisations(F))


def size_set(F: Hypergraph) -> tuple[int, ...]:
    reals = realisations(F)
    if not reals:
        raise NotPartiteError(f"{F!r} admits no {F.k}-partite realisation")
    return tuple(sorted({s for r in reals for s in r.sizes}))


def gcd_size_set(F: Hypergraph) -> int:
    return reduce(gcd, size_set(F))
