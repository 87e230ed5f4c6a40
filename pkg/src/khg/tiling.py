"""F-factors and maximum F-tilings by exact search over copy vertex sets.

Rows of the exact-cover instance are the vertex sets of copies of F (one
witness embedding kept per set).  `factor_exists` runs Algorithm X with the
minimum-remaining-rows column rule; `max_tiling` is a branch and bound on
the same rows.
"""

from __future__ import annotations

import os
import time
from dataclasses import dataclass, field
from math import comb

from .core import Hypergraph, members, popcount
from .embed import Embedding, copy_vertex_sets

# eager row generation while C(n, f) stays below this many candidate sets
ROW_CAP = 250_000


@dataclass(frozen=True)
class SolveLimits:
    nodes: int | None = None
    seconds: float | None = None

    @classmethod
    def from_env(cls, nodes: int | None = None, seconds: float | None = None) -> "SolveLimits":
        """Explicit values win over KHG_BUDGET_NODES / KHG_BUDGET_SECONDS."""
        if nodes is None and os.environ.get("KHG_BUDGET_NODES"):
            nodes = int(os.environ["KHG_BUDGET_NODES"])
        if seconds is None and os.environ.get("KHG_BUDGET_SECONDS"):
            seconds = float(os.environ["KHG_BUDGET_SECONDS"])
        return cls(nodes, seconds)


class _OutOfBudget(Exception):
    pass


class _Budget:
    def __init__(self, limits: SolveLimits):
        self.limits = limits
        self.nodes = 0
        self.deadline = None if limits.seconds is None else time.monotonic() + limits.seconds

    def tick(self) -> None:
        self.nodes += 1
        if self.limits.nodes is not None and self.nodes > self.limits.nodes:
            raise _OutOfBudget
        if self.deadline is not None and (self.nodes & 255) == 0 and time.monotonic() > self.deadline:
            raise _OutOfBudget


@dataclass
class TilingCertificate:
    n: int
    tiles: list[Embedding]
    exhaustive: bool = True

    @property
    def covered(self) -> tuple[int, ...]:
        return tuple(sorted(v for t in self.tiles for v in t.mapping))

    @property
    def uncovered(self) -> tuple[int, ...]:
        cov = set(self.covered)
        return tuple(v for v in range(self.n) if v not in cov)

    @property
    def is_factor(self) -> bool:
        return not self.uncovered

    def to_dict(self, F: Hypergraph) -> dict:
        return {
            "n": self.n,
            "tiles": [
                {"vertices": list(t.vertices), "edges_image": [list(e) for e in t.edge_image(F)],
                 "mapping": list(t.mapping)}
                for t in self.tiles
            ],
            "uncovered": list(self.uncovered),
            "exhaustive": self.exhaustive,
        }


def certificate_from_dict(data: dict, F: Hypergraph) -> "ClaimedCertificate":
    return ClaimedCertificate(
        n=int(data["n"]),
        tiles=[
            (tuple(t["vertices"]), tuple(tuple(e) for e in t["edges_image"]), tuple(t["mapping"]))
            for t in data["tiles"]
        ],
        uncovered=tuple(data["uncovered"]),
    )


@dataclass
class ClaimedCertificate:
    """A certificate as read from disk: nothing about it is trusted yet."""

    n: int
    tiles: list[tuple[tuple[int, ...], tuple[tuple[int, ...], ...], tuple[int, ...]]]
    uncovered: tuple[int, ...]


def verify_certificate(F: Hypergraph, H: Hypergraph, cert) -> bool:
    """Check a TilingCertificate or ClaimedCertificate against F and H."""
    if isinstance(cert, TilingCertificate):
        claimed = ClaimedCertificate(
            cert.n,
            [(t.vertices, t.edge_image(F), t.mapping) for t in cert.tiles],
            cert.uncovered,
        )
    else:
        claimed = cert
    if claimed.n != H.n:
        return False
    seen: set[int] = set()
    for vertices, edges_image, mapping in claimed.tiles:
        emb = Embedding(tuple(mapping))
        if not emb.is_valid(F, H):
            return False
        if tuple(vertices) != emb.vertices or tuple(edges_image) != emb.edge_image(F):
            return False
        if seen.intersection(mapping):
            return False
        seen.update(mapping)
    expected = tuple(v for v in range(H.n) if v not in seen)
    return tuple(claimed.uncovered) == expected


class _Rows:
    """Copy vertex sets, deduplicated, in increasing mask order."""

    def __init__(self, F: Hypergraph, H: Hypergraph):
        self.F, self.H = F, H
        self.masks: list[int] = []
        self.witness: list[Embedding] = []
        self.by_vertex: list[list[int]] = [[] for _ in range(H.n)]
        full = H.all_vertices
        found: dict[int, Embedding] = {}
        for v in range(H.n):
            above = full & ~((1 << v) - 1)
            found.update(copy_vertex_sets(F, H, v, above))
        for mask in sorted(found):
            idx = len(self.masks)
            self.masks.append(mask)
            self.witness.append(found[mask])
            for v in members(mask):
                self.by_vertex[v].append(idx)


@dataclass
class FactorResult:
    status: str  # "yes" | "no" | "unknown"
    certificate: TilingCertificate | None
    nodes: int
    exhaustive: bool
    reason: str = ""
    rows: int | None = None
    uncoverable: tuple[int, ...] = field(default=())

    def to_dict(self, F: Hypergraph) -> dict:
        return {
            "status": self.status,
            "exhaustive": self.exhaustive,
            "nodes": self.nodes,
            "rows": self.rows,
            "reason": self.reason,
            "uncoverable_vertices": list(self.uncoverable),
            "certificate": None if self.certificate is None else self.certificate.to_dict(F),
        }


def _trivial_no(F: Hypergraph, H: Hypergraph) -> str | None:
    if F.k != H.k:
        return "uniformity mismatch"
    if F.n == 0:
        return "empty pattern"
    if H.n % F.n:
        return f"v(F) = {F.n} does not divide v(H) = {H.n}"
    return None


def factor_exists(F: Hypergraph, H: Hypergraph, limits: SolveLimits = SolveLimits()) -> FactorResult:
    """Decide whether H has an F-factor.

    "no" is only reported after an exhaustive search; budget exhaustion
    gives "unknown".
    """
    why = _trivial_no(F, H)
    if why is not None:
        return FactorResult("no", None, 0, True, why)
    if H.n == 0:
        return FactorResult("yes", TilingCertificate(0, []), 0, True, "empty host")
    budget = _Budget(limits)
    if comb(H.n, F.n) <= ROW_CAP:
        result = _factor_eager(F, H, budget)
    else:
        result = _factor_lazy(F, H, budget)
    if result.certificate is not None and not verify_certificate(F, H, result.certificate):
        raise AssertionError("solver produced an invalid certificate")
    return result


def _factor_eager(F: Hypergraph, H: Hypergraph, budget: _Budget) -> FactorResult:
    rows = _Rows(F, H)
    dead = tuple(v for v in range(H.n) if not rows.by_vertex[v])
    if dead:
        return FactorResult("no", None, 0, True, "some vertex lies in no copy of F",
                            rows=len(rows.masks), uncoverable=dead)
    masks, by_vertex = rows.masks, rows.by_vertex
    chosen: list[int] = []

    def search(free: int) -> bool:
        if not free:
            return True
        budget.tick()
        best = None
        for v in members(free):
            opts = [r for r in by_vertex[v] if masks[r] & ~free == 0]
            if best is None or len(opts) < len(best):
                best = opts
                if not opts:
                    return False
        for r in best:
            chosen.append(r)
            if search(free & ~masks[r]):
                return True
            chosen.pop()
        return False

    try:
        ok = search(H.all_vertices)
    except _OutOfBudget:
        return FactorResult("unknown", None, budget.nodes, False, "search budget exhausted",
                            rows=len(masks))
    if not ok:
        return FactorResult("no", None, budget.nodes, True, "exhaustive search", rows=len(masks))
    tiles = sorted((rows.witness[r] for r in chosen), key=lambda e: e.vertices)
    return FactorResult("yes", TilingCertificate(H.n, tiles), budget.nodes, True, "",
                        rows=len(masks))


def _factor_lazy(F: Hypergraph, H: Hypergraph, budget: _Budget) -> FactorResult:
    """Pivot on the lowest uncovered vertex, generating its copies on demand."""
    chosen: list[Embedding] = []

    def search(free: int) -> bool:
        if not free:
            return True
        budget.tick()
        pivot = (free & -free).bit_length() - 1
        for mask, emb in copy_vertex_sets(F, H, pivot, free).items():
            chosen.append(emb)
            if search(free & ~mask):
                return True
            chosen.pop()
        return False

    try:
        ok = search(H.all_vertices)
    except _OutOfBudget:
        return FactorResult("unknown", None, budget.nodes, False, "search budget exhausted")
    if not ok:
        return FactorResult("no", None, budget.nodes, True, "exhaustive search")
    tiles = sorted(chosen, key=lambda e: e.vertices)
    return FactorResult("yes", TilingCertificate(H.n, tiles), budget.nodes, True)


@dataclass
class TilingResult:
    certificate: TilingCertificate
    nodes: int

    @property
    def exhaustive(self) -> bool:
        return self.certificate.exhaustive

    def to_dict(self, F: Hypergraph) -> dict:
        return {"tiles": len(self.certificate.tiles), "nodes": self.nodes,
                "exhaustive": self.exhaustive, "certificate": self.certificate.to_dict(F)}


def max_tiling(F: Hypergraph, H: Hypergraph, limits: SolveLimits = SolveLimits()) -> TilingResult:
    """Maximum number of vertex-disjoint copies of F (branch and bound).

    Under a budget the best tiling found so far is returned with
    ``exhaustive=False``.
    """
    if F.k != H.k or F.n == 0 or F.n > H.n:
        return TilingResult(TilingCertificate(H.n, []), 0)
    rows = _Rows(F, H)
    masks, f = rows.masks, F.n
    target = H.n // f
    budget = _Budget(limits)
    best: list[int] = []
    chosen: list[int] = []

    def bb(avail: int) -> None:
        nonlocal best
        budget.tick()
        live = [r for r in range(len(masks)) if masks[r] & ~avail == 0]
        reach = 0
        for r in live:
            reach |= masks[r]
        if len(chosen) + popcount(reach) // f <= len(best):
            return
        if not live:
            return
        v = (reach & -reach).bit_length() - 1
        for r in live:
            if masks[r] >> v & 1:
                chosen.append(r)
                if len(chosen) > len(best):
                    best = list(chosen)
                if len(best) < target:
                    bb(avail & ~masks[r])
                chosen.pop()
                if len(best) == target:
                    return
        bb(avail & ~(1 << v))

    exhaustive = True
    try:
        bb(H.all_vertices)
    except _OutOfBudget:
        exhaustive = False
    tiles = sorted((rows.witness[r] for r in best), key=lambda e: e.vertices)
    return TilingResult(TilingCertificate(H.n, tiles, exhaustive), budget.nodes)
