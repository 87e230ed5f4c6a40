"""k-uniform hypergraphs over dense 0-based vertex ids.

Vertex sets are passed around as Python ints used as bitsets; the helpers
`to_mask` and `members` convert between masks and sorted vertex tuples.
"""

from __future__ import annotations

from itertools import combinations
from math import comb
from pathlib import Path
from typing import Iterable, Iterator


class KhgFormatError(ValueError):
    """A .khg file or edge list violates the format contract."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


def to_mask(vertices: Iterable[int]) -> int:
    m = 0
    for v in vertices:
        m |= 1 << v
    return m


def members(mask: int) -> tuple[int, ...]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return tuple(out)


def popcount(mask: int) -> int:
    return bin(mask).count("1")


class Hypergraph:
    """Immutable k-graph on vertices 0..n-1.

    Edges are stored as strictly increasing k-tuples in lexicographic order.
    ``link_index`` maps every (k-1)-tuple in the shadow to the bitset of
    vertices completing it to an edge; it is built eagerly so instances can
    be shared between threads without synchronisation.
    """

    __slots__ = ("k", "n", "edges", "edge_set", "link_index", "_vertex_masks", "_hash")

    def __init__(self, k: int, n: int, edges: Iterable[Iterable[int]] = ()):
        if k < 1:
            raise ValueError(f"uniformity must be positive, got {k}")
        if n < 0:
            raise ValueError(f"vertex count must be non-negative, got {n}")
        canon = set()
        for e in edges:
            t = tuple(sorted(e))
            if len(t) != k or len(set(t)) != k:
                raise ValueError(f"edge {tuple(e)} does not have {k} distinct vertices")
            if t[0] < 0 or t[-1] >= n:
                raise ValueError(f"edge {t} has a vertex outside [0, {n})")
            canon.add(t)
        self.k = k
        self.n = n
        self.edges = tuple(sorted(canon))
        self.edge_set = frozenset(self.edges)
        link: dict[tuple[int, ...], int] = {}
        vmask = [0] * n
        for e in self.edges:
            for i, v in enumerate(e):
                rest = e[:i] + e[i + 1:]
                link[rest] = link.get(rest, 0) | (1 << v)
                vmask[v] |= to_mask(rest)
        self.link_index = link
        # union of all co-edge vertices per vertex, used for cheap pruning
        self._vertex_masks = tuple(vmask)
        self._hash = hash((k, n, self.edges))

    # -- basic protocol -------------------------------------------------
    def __repr__(self) -> str:
        return f"Hypergraph(k={self.k}, n={self.n}, m={len(self.edges)})"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Hypergraph):
            return NotImplemented
        return (self.k, self.n, self.edges) == (other.k, other.n, other.edges)

    def __hash__(self) -> int:
        return self._hash

    @property
    def m(self) -> int:
        return len(self.edges)

    @property
    def all_vertices(self) -> int:
        return (1 << self.n) - 1

    def has_edge(self, vertices: Iterable[int]) -> bool:
        return tuple(sorted(vertices)) in self.edge_set

    def link_mask(self, subset: Iterable[int]) -> int:
        """Bitset of vertices v with subset + {v} an edge; subset has k-1 vertices."""
        return self.link_index.get(tuple(sorted(subset)), 0)

    def neighbourhood_mask(self, v: int) -> int:
        """Vertices sharing at least one edge with v."""
        return self._vertex_masks[v]

    def complete(self) -> bool:
        return len(self.edges) == comb(self.n, self.k)


def degree(H: Hypergraph, S: Iterable[int]) -> int:
    """Number of edges of H containing the vertex set S (1 <= |S| <= k-1)."""
    S = tuple(sorted(set(S)))
    s = len(S)
    if not 1 <= s <= H.k - 1:
        raise ValueError(f"degree needs 1 <= |S| <= {H.k - 1}, got |S| = {s}")
    if any(v < 0 or v >= H.n for v in S):
        return 0
    if s == H.k - 1:
        return popcount(H.link_mask(S))
    Sset = set(S)
    return sum(1 for e in H.edges if Sset.issubset(e))


def min_degree(H: Hypergraph, s: int) -> int:
    if not 1 <= s <= H.k - 1:
        raise ValueError(f"s must lie in [1, {H.k - 1}], got {s}")
    if H.n < s:
        raise ValueError(f"no {s}-subsets in a hypergraph on {H.n} vertices")
    counts = dict.fromkeys(combinations(range(H.n), s), 0)
    for e in H.edges:
        for S in combinations(e, s):
            counts[S] += 1
    return min(counts.values())


def codegrees(H: Hypergraph) -> dict[tuple[int, ...], int]:
    """Degree of every (k-1)-subset of V(H), zero-degree sets included."""
    link = H.link_index
    return {S: popcount(link.get(S, 0)) for S in combinations(range(H.n), H.k - 1)}


def shadow(H: Hypergraph) -> tuple[tuple[int, ...], ...]:
    return tuple(sorted(H.link_index))


def link(H: Hypergraph, v: int) -> Hypergraph:
    """The (k-1)-graph N_H(v), kept on the original vertex ids (v isolated)."""
    if not 0 <= v < H.n:
        raise ValueError(f"vertex {v} outside [0, {H.n})")
    return Hypergraph(H.k - 1, H.n, (tuple(u for u in e if u != v) for e in H.edges if v in e))


def induced(H: Hypergraph, U: Iterable[int]) -> Hypergraph:
    """H[U] relabelled order-preservingly onto 0..|U|-1."""
    U = sorted(set(U))
    if U and (U[0] < 0 or U[-1] >= H.n):
        raise ValueError("U must be a subset of V(H)")
    pos = {v: i for i, v in enumerate(U)}
    return Hypergraph(
        H.k, len(U), (tuple(pos[v] for v in e) for e in H.edges if all(v in pos for v in e))
    )


def iter_edges_within(H: Hypergraph, mask: int) -> Iterator[tuple[int, ...]]:
    for e in H.edges:
        if all(mask >> v & 1 for v in e):
            yield e


# -- .khg text format ---------------------------------------------------

def dumps(H: Hypergraph) -> str:
    lines = [f"khg {H.k} {H.n} {H.m}"]
    lines.extend(" ".join(map(str, e)) for e in H.edges)
    return "\n".join(lines) + "\n"


def loads(text: str) -> Hypergraph:
    if not text.endswith("\n"):
        raise KhgFormatError("missing trailing newline", line=text.count("\n") + 1)
    lines = text[:-1].split("\n")
    header = lines[0].split(" ")
    if len(header) != 4 or header[0] != "khg":
        raise KhgFormatError("header must be 'khg <k> <n> <m>'", line=1)
    try:
        k, n, m = (int(x) for x in header[1:])
    except ValueError:
        raise KhgFormatError("header fields must be integers", line=1) from None
    if k < 1 or n < 0 or m < 0:
        raise KhgFormatError("header fields out of range", line=1)
    body = lines[1:]
    if len(body) != m:
        raise KhgFormatError(f"header announces {m} edges, found {len(body)} lines", line=1)
    edges = []
    prev = None
    for lineno, raw in enumerate(body, start=2):
        parts = raw.split(" ")
        try:
            e = tuple(int(x) for x in parts)
        except ValueError:
            raise KhgFormatError(f"non-integer vertex id in {raw!r}", line=lineno) from None
        if len(e) != k:
            raise KhgFormatError(f"expected {k} vertex ids, got {len(e)}", line=lineno)
        if any(a >= b for a, b in zip(e, e[1:])):
            raise KhgFormatError("vertex ids must be strictly increasing", line=lineno)
        if e[0] < 0 or e[-1] >= n:
            raise KhgFormatError(f"vertex id outside [0, {n})", line=lineno)
        if prev is not None:
            if e == prev:
                raise KhgFormatError("duplicate edge", line=lineno)
            if e < prev:
                raise KhgFormatError("edges not in lexicographic order", line=lineno)
        prev = e
        edges.append(e)
    return Hypergraph(k, n, edges)


def read_khg(path: str | Path) -> Hypergraph:
    return loads(Path(path).read_text(encoding="utf-8"))


def write_khg(H: Hypergraph, path: str | Path) -> None:
    Path(path).write_text(dumps(H), encoding="utf-8")
