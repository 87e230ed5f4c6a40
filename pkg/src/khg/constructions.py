"""Seeded generators: random k-graphs, the triangle cone, cone augmentation
and a catalog of named patterns.

Randomness comes from ``random.Random(seed)`` (MT19937).  Stream semantics,
versioned as ``RNG_STREAM``: one ``random()`` draw per candidate set, with
candidates visited in lexicographic order of their sorted vertex tuples; a
candidate is kept iff the draw is ``< float(p)``.  Output is therefore fixed
by (kind, parameters, seed) on every platform.
"""

from __future__ import annotations

import json
import random
import re
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from itertools import combinations, product
from pathlib import Path

from .core import Hypergraph

RNG_STREAM = "mt19937-lex-v1"


def _bernoulli_subsets(n: int, r: int, p, rng: random.Random):
    threshold = float(p)
    return [c for c in combinations(range(n), r) if rng.random() < threshold]


def binomial(n: int, k: int, p, seed: int) -> Hypergraph:
    p = Fraction(p)
    if not 0 <= p <= 1:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    rng = random.Random(seed)
    if p == 1:
        return Hypergraph(k, n, combinations(range(n), k))
    if p == 0:
        return Hypergraph(k, n)
    return Hypergraph(k, n, _bernoulli_subsets(n, k, p, rng))


def random_graph(n: int, q, seed: int) -> list[tuple[int, int]]:
    """Edge list of G(n, q) under the same stream semantics as `binomial`."""
    return [tuple(e) for e in binomial(n, 2, q, seed).edges]


def triangle_cone(n: int, q=None, seed: int | None = None, graph=None) -> Hypergraph:
    """3-graph on n vertices with apex z = n-1.

    A graph G on 0..n-2 is sampled with edge probability q (or taken from
    ``graph``).  Triples of G-triangles become edges, and {u, v, z} is an
    edge for every non-edge uv of G.  Every pair in N(z) is a G-non-edge
    while every pair of non-apex vertices in N(w) spans a G-edge, so z shares
    no neighbourhood pair with any other vertex.
    """
    if n < 4:
        raise ValueError("triangle_cone needs n >= 4")
    m = n - 1
    if graph is None:
        if q is None or seed is None:
            raise ValueError("give either q and seed, or an explicit graph")
        q = Fraction(q)
        if not 0 < q < 1:
            raise ValueError(f"q must lie strictly between 0 and 1, got {q}")
        graph = random_graph(m, q, seed)
    adj = [0] * m
    for u, v in graph:
        if not (0 <= u < m and 0 <= v < m) or u == v:
            raise ValueError(f"graph edge {(u, v)} outside [0, {m})")
        adj[u] |= 1 << v
        adj[v] |= 1 << u
    edges = []
    for a, b, c in combinations(range(m), 3):
        if adj[a] >> b & 1 and adj[a] >> c & 1 and adj[b] >> c & 1:
            edges.append((a, b, c))
    z = m
    for u, v in combinations(range(m), 2):
        if not adj[u] >> v & 1:
            edges.append((u, v, z))
    return Hypergraph(3, n, edges)


def cone_augment(H: Hypergraph, count: int) -> Hypergraph:
    """Add `count` fresh vertices n..n+count-1 and every k-set meeting them."""
    if count < 1:
        raise ValueError("cone_augment needs at least one new vertex")
    n2 = H.n + count
    new = [e for e in combinations(range(n2), H.k) if e[-1] >= H.n]
    return Hypergraph(H.k, n2, list(H.edges) + new)


def complete_kpartite(parts) -> Hypergraph:
    parts = [int(a) for a in parts]
    if len(parts) < 2 or min(parts) < 1:
        raise ValueError("need at least two parts, each of positive size")
    classes, start = [], 0
    for a in parts:
        classes.append(range(start, start + a))
        start += a
    return Hypergraph(len(parts), start, product(*classes))


def matching(size: int, k: int = 3) -> Hypergraph:
    return Hypergraph(k, size * k, (tuple(range(i * k, i * k + k)) for i in range(size)))


def complete(n: int, k: int) -> Hypergraph:
    return Hypergraph(k, n, combinations(range(n), k))


K4_MINUS = Hypergraph(3, 4, [(0, 1, 2), (0, 1, 3), (1, 2, 3)])

_CATALOG_PATTERNS = [
    (re.compile(r"K_?\{?(\d+(?:,\d+)+)\}?$"), lambda m: complete_kpartite(m.group(1).split(","))),
    (re.compile(r"(?:K4-|K_4\^\(3\)-|K4\^-)$"), lambda m: K4_MINUS),
    (re.compile(r"edge(?:\((\d+)\))?$"), lambda m: matching(1, int(m.group(1) or 3))),
    (re.compile(r"matching\((\d+)(?:,(\d+))?\)$"),
     lambda m: matching(int(m.group(1)), int(m.group(2) or 3))),
    (re.compile(r"complete\((\d+),(\d+)\)$"),
     lambda m: complete(int(m.group(1)), int(m.group(2)))),
]

CATALOG_NAMES = (
    "K_{a1,...,ak}", "K4-", "edge", "edge(k)", "matching(m)", "matching(m,k)", "complete(n,k)",
)


def catalog(name: str) -> Hypergraph:
    """Named pattern, e.g. ``K_{2,2,2}``, ``K4-``, ``edge``, ``matching(2)``."""
    key = name.replace(" ", "")
    for pattern, build in _CATALOG_PATTERNS:
        m = pattern.match(key)
        if m:
            return build(m)
    raise KeyError(f"unknown catalog name {name!r}; known forms: {', '.join(CATALOG_NAMES)}")


@dataclass(frozen=True)
class GenSpec:
    kind: str
    params: dict = field(default_factory=dict)
    seed: int | None = None
    rng: str = RNG_STREAM

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True, indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "GenSpec":
        return cls(**json.loads(text))


def generate(spec: GenSpec, base: Hypergraph | None = None) -> Hypergraph:
    """Build the hypergraph described by `spec` (cone_augment needs `base`)."""
    p = spec.params
    if spec.kind == "binomial":
        return binomial(p["n"], p["k"], Fraction(p["p"]), spec.seed)
    if spec.kind == "triangle_cone":
        return triangle_cone(p["n"], Fraction(p["q"]), spec.seed)
    if spec.kind == "cone_augment":
        if base is None:
            raise ValueError("cone_augment needs the base hypergraph")
        return cone_augment(base, p["count"])
    if spec.kind == "complete_kpartite":
        return complete_kpartite(p["parts"])
    if spec.kind == "catalog":
        return catalog(p["name"])
    raise ValueError(f"unknown generator kind {spec.kind!r}")


def write_sidecar(spec: GenSpec, khg_path: str | Path) -> Path:
    out = Path(str(khg_path) + ".spec.json")
    out.write_text(spec.to_json(), encoding="utf-8")
    return out
