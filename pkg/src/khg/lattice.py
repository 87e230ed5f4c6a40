"""Index vectors, integer lattices in Hermite normal form, shadow-disjoint
bipartitions of a pattern, and robust F-vectors of a partitioned host."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from functools import reduce
from itertools import combinations
from math import gcd
from typing import Iterable, Sequence

from .core import Hypergraph
from .embed import copies, iter_embeddings


def index_vector(parts: Sequence[Iterable[int]], S: Iterable[int]) -> tuple[int, ...]:
    """(|S & V_1|, ..., |S & V_r|) for parts = (V_1, ..., V_r)."""
    S = set(S)
    return tuple(len(S.intersection(p)) for p in parts)


def hermite_normal_form(vectors: Iterable[Sequence[int]], dim: int) -> list[list[int]]:
    """Row-style HNF of the lattice spanned by `vectors`.

    Rows are echelon with strictly increasing pivot columns, positive
    pivots, and entries above each pivot reduced into [0, pivot).
    """
    rows = [list(v) for v in vectors if any(v)]
    for v in rows:
        if len(v) != dim:
            raise ValueError(f"vector {v} does not have dimension {dim}")
    basis: list[list[int]] = []
    col = 0
    while rows and col < dim:
        nz = [r for r in rows if r[col]]
        zero = [r for r in rows if not r[col]]
        if not nz:
            col += 1
            continue
        # Euclid on column `col` across all rows with a non-zero entry
        while len(nz) > 1:
            nz.sort(key=lambda r: abs(r[col]))
            piv = nz[0]
            nxt = [piv]
            for r in nz[1:]:
                q = r[col] // piv[col]
                r = [a - q * b for a, b in zip(r, piv)]
                (nxt if r[col] else zero).append(r)
            nz = nxt
        piv = nz[0]
        if piv[col] < 0:
            piv = [-a for a in piv]
        basis.append(piv)
        rows = [r for r in zero if any(r)]
        col += 1
    # reduce entries above pivots
    for i, row in enumerate(basis):
        c = next(j for j, a in enumerate(row) if a)
        for prev in basis[:i]:
            q = prev[c] // row[c]
            if q:
                for j in range(dim):
                    prev[j] -= q * row[j]
    return basis


@dataclass(frozen=True)
class IntegerLattice:
    dim: int
    generators: tuple[tuple[int, ...], ...]
    basis: tuple[tuple[int, ...], ...]

    def __contains__(self, vec: Sequence[int]) -> bool:
        if len(vec) != self.dim:
            raise ValueError(f"vector {tuple(vec)} does not have dimension {self.dim}")
        v = list(vec)
        for row in self.basis:
            c = next(j for j, a in enumerate(row) if a)
            if any(v[:c]):
                return False
            if v[c] % row[c]:
                return False
            q = v[c] // row[c]
            v = [a - q * b for a, b in zip(v, row)]
        return not any(v)

    def contains(self, vec: Sequence[int]) -> bool:
        return vec in self

    @property
    def rank(self) -> int:
        return len(self.basis)


def lattice_from_generators(vectors: Iterable[Sequence[int]], dim: int | None = None) -> IntegerLattice:
    gens = tuple(tuple(int(a) for a in v) for v in vectors)
    if dim is None:
        if not gens:
            raise ValueError("dimension is required for an empty generator list")
        dim = len(gens[0])
    for g in gens:
        if len(g) != dim:
            raise ValueError(f"generator {g} does not have dimension {dim}")
    basis = hermite_normal_form(gens, dim)
    return IntegerLattice(dim, gens, tuple(tuple(r) for r in basis))


# -- shadow-disjoint bipartitions ------------------------------------------------

@dataclass(frozen=True)
class Bipartition:
    first: tuple[int, ...]
    second: tuple[int, ...]

    @property
    def vector(self) -> tuple[int, int]:
        return (len(self.first), len(self.second))


def is_shadow_disjoint(F: Hypergraph, first: set[int], s: int) -> bool:
    vec = [len(first.intersection(e)) for e in F.edges]
    for (i, e), (j, g) in combinations(enumerate(F.edges), 2):
        if vec[i] != vec[j] and len(set(e).intersection(g)) >= s:
            return False
    return True


def shadow_disjoint_bipartitions(F: Hypergraph, s: int) -> list[Bipartition]:
    """Every ordered bipartition (V_1, V_2) of V(F), empty sides allowed,
    in which edges with different index vectors share fewer than s vertices."""
    if not 2 <= s <= F.k - 1:
        raise ValueError(f"s must lie in [2, {F.k - 1}], got {s}")
    out = []
    for code in range(1 << F.n):
        first = {v for v in range(F.n) if code >> v & 1}
        if is_shadow_disjoint(F, first, s):
            out.append(Bipartition(
                tuple(sorted(first)), tuple(v for v in range(F.n) if v not in first)
            ))
    return out


def trans_generators(F: Hypergraph, s: int) -> list[tuple[int, int]]:
    return sorted({b.vector for b in shadow_disjoint_bipartitions(F, s)})


@dataclass(frozen=True)
class TransDecision:
    generators: tuple[tuple[int, int], ...]
    lattice: IntegerLattice
    in_trans: bool
    difference_gcd: int

    def to_dict(self) -> dict:
        return {
            "generators": [list(g) for g in self.generators],
            "hnf_basis": [list(r) for r in self.lattice.basis],
            "in_trans": self.in_trans,
            "difference_gcd": self.difference_gcd,
        }


def difference_gcd(generators: Sequence[Sequence[int]]) -> int:
    """gcd of first-coordinate differences over all generator pairs (0 if none)."""
    if not generators:
        return 0
    a0 = generators[0][0]
    return reduce(gcd, (g[0] - a0 for g in generators), 0)


def trans_decision(F: Hypergraph, s: int = 2) -> TransDecision:
    """Whether (1, -1) lies in the lattice generated by the index vectors of
    all s-shadow-disjoint bipartitions of F.

    Every generator has coordinate sum v(F), so membership is equivalent to
    the generators' first coordinates having pairwise differences with gcd
    1; both routes are computed and must agree.
    """
    gens = trans_generators(F, s)
    lat = lattice_from_generators(gens, 2)
    member = (1, -1) in lat
    dg = difference_gcd(gens)
    if member != (dg == 1):
        raise AssertionError(f"lattice membership and gcd route disagree for {F!r}")
    return TransDecision(tuple(gens), lat, member, dg)


# -- robust vectors in a partitioned host ------------------------------------------

@dataclass
class RobustReport:
    counts: dict[tuple[int, ...], int]
    threshold: int
    labeled: bool

    @property
    def robust(self) -> list[tuple[int, ...]]:
        return sorted(v for v, c in self.counts.items() if c >= self.threshold)

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    def lattice(self) -> IntegerLattice:
        dim = len(next(iter(self.counts))) if self.counts else 0
        return lattice_from_generators(self.robust, dim)

    def to_dict(self) -> dict:
        lat = self.lattice() if self.counts else None
        return {
            "counts": [{"vector": list(v), "copies": c} for v, c in sorted(self.counts.items())],
            "threshold": self.threshold,
            "labeled": self.labeled,
            "robust": [list(v) for v in self.robust],
            "total": self.total,
            "hnf_basis": [] if lat is None else [list(r) for r in lat.basis],
            "transferral": None if lat is None or lat.dim != 2 else (1, -1) in lat,
        }


def robust_vectors(H: Hypergraph, parts: Sequence[Iterable[int]], F: Hypergraph,
                   lambda_count: int = 1, labeled: bool = False) -> RobustReport:
    """Copies of F in H classified by the index vector of their vertex set.

    ``parts = (V_0, V_1, ..., V_r)`` must partition V(H); V_0 is excluded
    from the coordinates.  Vectors realised by at least ``lambda_count``
    copies are the robust ones.
    """
    parts = [sorted(set(p)) for p in parts]
    if len(parts) < 2:
        raise ValueError("need V_0 and at least one further class")
    flat = [v for p in parts for v in p]
    if sorted(flat) != list(range(H.n)):
        raise ValueError("parts must partition V(H)")
    classes = parts[1:]
    counts: Counter = Counter()
    if labeled:
        for emb in iter_embeddings(F, H):
            counts[index_vector(classes, emb.mapping)] += 1
    else:
        for cp in copies(F, H):
            counts[index_vector(classes, cp.vertices)] += 1
    return RobustReport(dict(sorted(counts.items())), lambda_count, labeled)
