"""Copies of a pattern F inside a host H, F-covers, good pairs and
reachability counts.

Embeddings are found by backtracking over F's vertices in a fixed search
order.  Candidate images are bitsets: each F-edge completed by the next
vertex intersects the candidates with the link of the already-mapped part
of that edge.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from fractions import Fraction
from itertools import combinations
from math import comb, factorial
from typing import Iterator

from .core import Hypergraph, codegrees, members, popcount, to_mask
from .parallel import BudgetExceeded, map_chunks


@dataclass(frozen=True)
class Embedding:
    """Injective map V(F) -> V(H); ``mapping[x]`` is the image of x."""

    mapping: tuple[int, ...]

    @property
    def vertices(self) -> tuple[int, ...]:
        return tuple(sorted(self.mapping))

    @property
    def mask(self) -> int:
        return to_mask(self.mapping)

    def edge_image(self, F: Hypergraph) -> tuple[tuple[int, ...], ...]:
        return tuple(sorted(tuple(sorted(self.mapping[x] for x in e)) for e in F.edges))

    def is_valid(self, F: Hypergraph, H: Hypergraph) -> bool:
        phi = self.mapping
        if len(phi) != F.n or len(set(phi)) != F.n:
            return False
        if any(not 0 <= y < H.n for y in phi):
            return False
        return all(H.has_edge(phi[x] for x in e) for e in F.edges)


def _vertex_degrees(G: Hypergraph) -> list[int]:
    deg = [0] * G.n
    for e in G.edges:
        for v in e:
            deg[v] += 1
    return deg


class _Matcher:
    """Search plan for embedding F into H, optionally starting at a pinned vertex."""

    def __init__(self, F: Hypergraph, H: Hypergraph, first: int | None = None):
        if F.k != H.k:
            raise ValueError(f"uniformity mismatch: F is a {F.k}-graph, H a {H.k}-graph")
        self.F, self.H = F, H
        fdeg = _vertex_degrees(F)
        hdeg = _vertex_degrees(H)
        self.order = self._search_order(F, fdeg, first)
        pos = {x: i for i, x in enumerate(self.order)}
        # for each position, the other positions of every F-edge it completes
        self.checks: list[list[tuple[int, ...]]] = [[] for _ in self.order]
        for e in F.edges:
            last = max(pos[x] for x in e)
            self.checks[last].append(tuple(pos[x] for x in e if pos[x] != last))
        self.deg_ok = [
            to_mask(v for v in range(H.n) if hdeg[v] >= fdeg[x]) for x in self.order
        ]

    @staticmethod
    def _search_order(F: Hypergraph, fdeg: list[int], first: int | None) -> list[int]:
        if F.n == 0:
            return []
        if first is None:
            first = min(range(F.n), key=lambda x: (-fdeg[x], x))
        order, placed = [first], {first}
        while len(order) < F.n:
            def score(x):
                completed = touching = 0
                for e in F.edges:
                    if x in e:
                        inside = sum(1 for y in e if y in placed)
                        touching += inside > 0
                        completed += inside == F.k - 1
                return (-completed, -touching, -fdeg[x], x)

            nxt = min((x for x in range(F.n) if x not in placed), key=score)
            order.append(nxt)
            placed.add(nxt)
        return order

    def run(self, allowed: int, pinned_image: int | None = None) -> Iterator[tuple[int, ...]]:
        """Yield mappings (indexed by F vertex) in lexicographic order of the
        images taken along the search order."""
        F, H = self.F, self.H
        f = F.n
        if f == 0:
            yield ()
            return
        link = H.link_index
        order, checks, deg_ok = self.order, self.checks, self.deg_ok
        images = [0] * f

        def candidates(i: int, used: int) -> int:
            c = allowed & ~used & deg_ok[i]
            for others in checks[i]:
                if not c:
                    break
                c &= link.get(tuple(sorted(images[j] for j in others)), 0)
            return c

        first = candidates(0, 0)
        if pinned_image is not None:
            first &= 1 << pinned_image
        stack = [first]
        used = 0
        while stack:
            i = len(stack) - 1
            c = stack[i]
            if not c:
                stack.pop()
                if stack:
                    used &= ~(1 << images[i - 1])
                continue
            low = c & -c
            stack[i] = c ^ low
            images[i] = low.bit_length() - 1
            if i == f - 1:
                phi = [0] * f
                for j, x in enumerate(order):
                    phi[x] = images[j]
                yield tuple(phi)
                continue
            used |= low
            stack.append(candidates(i + 1, used))


@lru_cache(maxsize=256)
def _matcher(F: Hypergraph, H: Hypergraph, first: int | None) -> _Matcher:
    return _Matcher(F, H, first)


@dataclass
class EmbeddingList:
    embeddings: list[Embedding]
    exhaustive: bool


def iter_embeddings(F: Hypergraph, H: Hypergraph, allowed: int | None = None,
                    pin: tuple[int, int] | None = None) -> Iterator[Embedding]:
    """All embeddings of F into H[allowed]; ``pin=(x, v)`` forces x -> v."""
    if allowed is None:
        allowed = H.all_vertices
    if F.n > popcount(allowed):
        return
    if pin is None:
        it = _matcher(F, H, None).run(allowed)
    else:
        x, v = pin
        if not allowed >> v & 1:
            return
        it = _matcher(F, H, x).run(allowed, pinned_image=v)
    for phi in it:
        yield Embedding(phi)


def embeddings(F: Hypergraph, H: Hypergraph, limit: int | None = None) -> EmbeddingList:
    out = []
    for emb in iter_embeddings(F, H):
        if limit is not None and len(out) >= limit:
            return EmbeddingList(out, exhaustive=False)
        out.append(emb)
    return EmbeddingList(out, exhaustive=True)


@dataclass(frozen=True)
class Copy:
    vertices: tuple[int, ...]
    edges: tuple[tuple[int, ...], ...]
    witness: Embedding


def copies(F: Hypergraph, H: Hypergraph, allowed: int | None = None) -> list[Copy]:
    """Unlabelled copies: embeddings identified by image vertex set and image edge set."""
    seen: dict[tuple, Copy] = {}
    for emb in iter_embeddings(F, H, allowed):
        key = (emb.vertices, emb.edge_image(F))
        if key not in seen:
            seen[key] = Copy(key[0], key[1], emb)
    return sorted(seen.values(), key=lambda c: (c.vertices, c.edges))


def count_copies(F: Hypergraph, H: Hypergraph, labeled: bool = False) -> int:
    if labeled:
        return sum(1 for _ in iter_embeddings(F, H))
    return len(copies(F, H))


# subset scan is used while C(|allowed|-1, f-1) stays below this
SUBSET_SCAN_CAP = 20_000


def first_embedding_within(F: Hypergraph, H: Hypergraph, mask: int) -> Embedding | None:
    return next(iter_embeddings(F, H, mask), None)


def copy_vertex_sets(F: Hypergraph, H: Hypergraph, pivot: int, allowed: int,
                     strategy: str = "auto") -> dict[int, Embedding]:
    """Vertex sets (as masks) of copies of F in H[allowed] that contain `pivot`.

    Each set carries a canonical witness: the first embedding of F into
    H[set].  ``strategy`` is ``"subsets"`` (test every f-subset through the
    pivot), ``"embeddings"`` (enumerate pinned embeddings) or ``"auto"``.
    """
    f = F.n
    allowed |= 1 << pivot
    others = members(allowed & ~(1 << pivot))
    if f == 0 or f - 1 > len(others):
        return {}
    if strategy == "auto":
        strategy = "subsets" if comb(len(others), f - 1) <= SUBSET_SCAN_CAP else "embeddings"
    found: dict[int, Embedding] = {}
    if strategy == "subsets":
        # when every two F-vertices share an edge, a copy through the pivot
        # lies inside the pivot's neighbourhood
        if F.m and _pairwise_coedged(F):
            pool = [v for v in others if H.neighbourhood_mask(pivot) >> v & 1]
        else:
            pool = list(others)
        base = 1 << pivot
        for T in combinations(pool, f - 1):
            mask = base | to_mask(T)
            emb = first_embedding_within(F, H, mask)
            if emb is not None:
                found[mask] = emb
    elif strategy == "embeddings":
        masks = set()
        for x in range(f):
            for emb in iter_embeddings(F, H, allowed, pin=(x, pivot)):
                masks.add(emb.mask)
        for mask in masks:
            found[mask] = first_embedding_within(F, H, mask)
    else:
        raise ValueError(f"unknown strategy {strategy!r}")
    return dict(sorted(found.items()))


def _pairwise_coedged(F: Hypergraph) -> bool:
    share = [0] * F.n
    for e in F.edges:
        m = to_mask(e)
        for v in e:
            share[v] |= m
    full = (1 << F.n) - 1
    return all(s == full for s in share)


def cover_check(F: Hypergraph, H: Hypergraph) -> tuple[int, ...]:
    """Vertices of H lying in no copy of F (empty iff H has an F-cover)."""
    if F.n > H.n:
        return tuple(range(H.n))
    uncovered = []
    for v in range(H.n):
        if not any(
            next(iter_embeddings(F, H, pin=(x, v)), None) is not None for x in range(F.n)
        ):
            uncovered.append(v)
    return tuple(uncovered)


# -- good pairs ------------------------------------------------------------

@dataclass(frozen=True)
class GoodPairReport:
    u: int
    v: int
    eta: Fraction
    n: int
    k: int
    common_count: int
    good_set_count: int

    @property
    def threshold(self) -> Fraction:
        return self.eta * self.n ** (self.k - 1)

    @property
    def good(self) -> bool:
        return self.good_set_count >= self.threshold

    def to_dict(self) -> dict:
        return {
            "u": self.u, "v": self.v, "eta": str(self.eta),
            "common_neighbour_sets": self.common_count,
            "good_set_count": self.good_set_count,
            "required": str(self.threshold),
            "verdict": "good" if self.good else "bad",
        }


def common_neighbourhood(H: Hypergraph, u: int, v: int) -> list[tuple[int, ...]]:
    """(k-1)-sets S with S+{u} and S+{v} both edges of H."""
    bu, bv = 1 << u, 1 << v
    return [S for S, lm in H.link_index.items() if lm & bu and lm & bv]


def good_pair(H: Hypergraph, u: int, v: int, eta) -> GoodPairReport:
    if u == v:
        raise ValueError("a good pair needs two distinct vertices")
    eta = Fraction(eta)
    common = common_neighbourhood(H, u, v)
    need = eta * H.n
    good = sum(1 for S in common if popcount(H.link_index[S]) >= need)
    return GoodPairReport(min(u, v), max(u, v), eta, H.n, H.k, len(common), good)


@dataclass(frozen=True)
class HypothesisCheck:
    """Measured minimum-degree statistics behind the good-partner guarantee."""

    alpha: Fraction
    alpha_prime: Fraction
    low_sets: int
    allowed_low_sets: Fraction
    min_vertex_degree: int

    @property
    def holds(self) -> bool:
        return self.alpha > 0 and self.alpha_prime > 0 and self.low_sets <= self.allowed_low_sets

    def eta_bound(self, k: int) -> Fraction:
        """Supremum of eta covered by the guarantee: alpha * alpha' / (4 k!)."""
        return self.alpha * self.alpha_prime / (4 * factorial(k))

    def to_dict(self, k: int) -> dict:
        return {
            "alpha": str(self.alpha), "alpha_prime": str(self.alpha_prime),
            "low_codegree_sets": self.low_sets,
            "allowed_low_codegree_sets": str(self.allowed_low_sets),
            "min_vertex_degree": self.min_vertex_degree,
            "hypotheses_hold": self.holds,
            "eta_bound": str(self.eta_bound(k)),
        }


def measure_hypotheses(H: Hypergraph, alpha=None, alpha_prime=None) -> HypothesisCheck:
    """Measure (or check supplied) alpha, alpha'.

    alpha = delta_1(H) / C(n-1, k-1).  alpha' is the largest value for which
    at most (alpha/2) C(n-1, k-1) of the (k-1)-sets have degree < alpha' n.
    """
    n, k = H.n, H.k
    base = comb(n - 1, k - 1)
    deg = _vertex_degrees(H)
    dmin = min(deg) if deg else 0
    if alpha is None:
        alpha = Fraction(dmin, base) if base else Fraction(0)
    alpha = Fraction(alpha)
    allowed = alpha / 2 * base
    cod = sorted(codegrees(H).values())
    if alpha_prime is None:
        m = int(allowed)  # floor; allowed >= 0
        alpha_prime = Fraction(cod[m], n) if m < len(cod) and n else Fraction(0)
    alpha_prime = Fraction(alpha_prime)
    low = sum(1 for d in cod if d < alpha_prime * n)
    if dmin < alpha * base:
        # supplied alpha is not a valid minimum-degree ratio for H
        alpha_ok = Fraction(0)
    else:
        alpha_ok = alpha
    return HypothesisCheck(alpha_ok, alpha_prime, low, allowed, dmin)


@dataclass
class PartnerReport:
    v: int
    eta: Fraction
    partner: int | None
    hypotheses: HypothesisCheck
    pair: GoodPairReport | None = field(default=None)

    def to_dict(self, k: int) -> dict:
        return {
            "v": self.v, "eta": str(self.eta), "partner": self.partner,
            "pair": None if self.pair is None else self.pair.to_dict(),
            "hypotheses": self.hypotheses.to_dict(k),
        }


def good_partner_exists(H: Hypergraph, v: int, eta, alpha=None, alpha_prime=None) -> PartnerReport:
    """Smallest u != v making {u, v} eta-good, with the hypothesis measurements."""
    eta = Fraction(eta)
    hyp = measure_hypotheses(H, alpha, alpha_prime)
    for u in range(H.n):
        if u == v:
            continue
        rep = good_pair(H, u, v, eta)
        if rep.good:
            return PartnerReport(v, eta, u, hyp, rep)
    return PartnerReport(v, eta, None, hyp)


def good_pair_matrix(H: Hypergraph, eta) -> list[list[int]]:
    """good_set_count for every ordered pair (diagonal zero)."""
    M = [[0] * H.n for _ in range(H.n)]
    for u, v in combinations(range(H.n), 2):
        c = good_pair(H, u, v, eta).good_set_count
        M[u][v] = M[v][u] = c
    return M


# -- reachability ------------------------------------------------------------

@dataclass
class ReachReport:
    u: int
    v: int
    i: int
    count: int
    examined: int
    truncated: bool

    def to_dict(self) -> dict:
        return {"u": self.u, "v": self.v, "i": self.i, "count": self.count,
                "examined": self.examined, "truncated": self.truncated}


DEFAULT_REACH_BUDGET = 2_000_000


def _has_factor_on(F: Hypergraph, H: Hypergraph, mask: int) -> bool:
    size = popcount(mask)
    if size % F.n:
        return False
    if size == F.n:
        return first_embedding_within(F, H, mask) is not None
    from .core import induced
    from .tiling import factor_exists

    return factor_exists(F, induced(H, members(mask))).status == "yes"


def _reach_chunk(args) -> tuple[int, int, bool]:
    F, H, u, v, size, lead, pool, limit = args
    count = examined = 0
    bu, bv = 1 << u, 1 << v
    rest = [w for w in pool if w > lead]
    for T in combinations(rest, size - 1):
        W = (1 << lead) | to_mask(T)
        examined += 1
        if _has_factor_on(F, H, W | bu) and _has_factor_on(F, H, W | bv):
            count += 1
            if limit is not None and count >= limit:
                return count, examined, True
    return count, examined, False


def reachable_count(H: Hypergraph, F: Hypergraph, u: int, v: int, i: int = 1,
                    limit: int | None = None, budget: int = DEFAULT_REACH_BUDGET,
                    workers: int = 1) -> ReachReport:
    """Number of (i f - 1)-sets W avoiding u, v with F-factors in both
    H[{u} + W] and H[{v} + W]."""
    if u == v:
        raise ValueError("reachability needs two distinct vertices")
    if i < 1:
        raise ValueError("i must be at least 1")
    size = i * F.n - 1
    pool = [w for w in range(H.n) if w not in (u, v)]
    if size < 0 or size > len(pool):
        return ReachReport(min(u, v), max(u, v), i, 0, 0, False)
    total = comb(len(pool), size)
    if total > budget:
        raise BudgetExceeded(f"{total} candidate sets exceed the budget of {budget}")
    if size == 0:
        ok = _has_factor_on(F, H, 1 << u) and _has_factor_on(F, H, 1 << v)
        return ReachReport(min(u, v), max(u, v), i, int(ok), 1, False)
    a, b = min(u, v), max(u, v)
    chunks = [(F, H, a, b, size, lead, pool, limit) for lead in pool]
    if limit is not None:
        workers = 1  # early stop must respect the sequential order
    count = examined = 0
    truncated = False
    if workers <= 1:
        for ch in chunks:
            c, e, t = _reach_chunk(ch)
            count += c
            examined += e
            if limit is not None and count >= limit:
                truncated = True
                count = limit
                break
    else:
        for c, e, _ in map_chunks(_reach_chunk, chunks, workers):
            count += c
            examined += e
    return ReachReport(a, b, i, count, examined, truncated)
