"""Minimum discrepancy slack for the three quasi-randomness notions.

For density p = a/b all slack computations run on integers scaled by b;
`SlackReport.slack` holds the exact `Fraction`.

dot:    min over X_1..X_k of e(X_1,..,X_k) - p|X_1|...|X_k|
edge:   min over X, Y of e(X, Y) - p|X||Y|, Y a set of (k-1)-tuples
cherry: e(P, Q) - p|K(P, Q)| for sets P, Q of (k-1)-tuples

The dot and edge objectives are linear in each quantified set once the
others are fixed, so the optimal last set is a threshold set: take exactly
the elements with negative marginal.  Exact mode enumerates the remaining
sets and applies that rule; sampled mode searches heuristically and can
only over-estimate the minimum.

By default tuples in Y, P and Q must have pairwise distinct entries;
``degenerate=True`` admits every tuple of V^(k-1).
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations, permutations, product
from math import factorial, perm, prod

import numpy as np

from .core import Hypergraph, members, popcount, to_mask
from .parallel import BudgetExceeded, map_chunks

NOTIONS = ("dot", "edge", "cherry")
DOT_BUDGET_BITS = 26
EDGE_BUDGET_N = 20
_EDGE_BLOCK = 1 << 14


@dataclass
class SlackReport:
    notion: str
    p: Fraction
    n: int
    k: int
    slack: Fraction
    witness: dict
    mode: str
    degenerate: bool = False
    samples: int | None = None
    seed: int | None = None
    trajectory: list[Fraction] = field(default_factory=list, repr=False)

    @property
    def normalized_slack(self) -> Fraction:
        return self.slack / self.n ** self.k if self.n else Fraction(0)

    def to_dict(self) -> dict:
        out = {
            "notion": self.notion,
            "p": str(self.p),
            "n": self.n,
            "k": self.k,
            "slack": str(self.slack),
            "slack_float": float(self.slack),
            "normalized_slack": float(self.normalized_slack),
            "witness": self.witness,
            "mode": self.mode,
            "degenerate_tuples": self.degenerate,
        }
        if self.mode == "sampled":
            out["samples"] = self.samples
            out["seed"] = self.seed
        return out


def _scaled(p) -> tuple[int, int, Fraction]:
    p = Fraction(p)
    if not 0 <= p <= 1:
        raise ValueError(f"density must lie in [0, 1], got {p}")
    return p.numerator, p.denominator, p


def edge_tensor(H: Hypergraph) -> np.ndarray:
    """k-dimensional 0/1 array, 1 exactly at orderings of edges."""
    T = np.zeros((H.n,) * H.k, dtype=np.int64)
    for e in H.edges:
        for t in permutations(e):
            T[t] = 1
    return T


# -- direct evaluators (used for witnesses and as reference values) ------------

def dot_count(H: Hypergraph, sets) -> int:
    """Number of (x_1..x_k) in X_1 x ... x X_k whose entries form an edge."""
    sets = [set(s) for s in sets]
    if len(sets) != H.k:
        raise ValueError(f"need {H.k} sets")
    return sum(
        1 for e in H.edges for t in permutations(e) if all(x in X for x, X in zip(t, sets))
    )


def dot_value(H: Hypergraph, p, sets) -> Fraction:
    p = Fraction(p)
    return dot_count(H, sets) - p * prod(len(set(s)) for s in sets)


def edge_value(H: Hypergraph, p, X, Y) -> Fraction:
    """e(X, Y) - p|X||Y| for an explicit collection Y of (k-1)-tuples."""
    p = Fraction(p)
    X = set(X)
    Y = set(tuple(y) for y in Y)
    hits = sum(1 for y in Y for x in X if H.has_edge((x, *y)) and x not in y)
    return hits - p * len(X) * len(Y)


def _check_tuples(H: Hypergraph, tuples, degenerate: bool, name: str) -> set[tuple[int, ...]]:
    out = set()
    for t in tuples:
        t = tuple(t)
        if len(t) != H.k - 1:
            raise ValueError(f"{name}: tuple {t} does not have {H.k - 1} entries")
        if any(not 0 <= x < H.n for x in t):
            raise ValueError(f"{name}: tuple {t} has an entry outside [0, {H.n})")
        if not degenerate and len(set(t)) != len(t):
            raise ValueError(f"{name}: tuple {t} repeats an entry (distinct-entry convention)")
        out.add(t)
    return out


def cherry_chains(H: Hypergraph, P, Q, degenerate: bool = False) -> list[tuple[int, ...]]:
    """K(P, Q): k-tuples whose first k-1 entries lie in P and last k-1 in Q."""
    P = _check_tuples(H, P, degenerate, "P")
    Q = _check_tuples(H, Q, degenerate, "Q")
    by_prefix: dict[tuple[int, ...], list[int]] = {}
    for q in Q:
        by_prefix.setdefault(q[:-1], []).append(q[-1])
    chains = []
    for t in P:
        for last in by_prefix.get(t[1:], ()):
            c = t + (last,)
            if degenerate or len(set(c)) == len(c):
                chains.append(c)
    return sorted(chains)


def cherry_slack(H: Hypergraph, p, P, Q, degenerate: bool = False) -> Fraction:
    """e_cherry(P, Q) - p |K(P, Q)|."""
    p = Fraction(p)
    chains = cherry_chains(H, P, Q, degenerate)
    hits = sum(1 for c in chains if len(set(c)) == H.k and H.has_edge(c))
    return hits - p * len(chains)


# -- exact dot --------------------------------------------------------------------

@lru_cache(maxsize=8)
def _subset_matrix(n: int) -> np.ndarray:
    """Row m is the 0/1 indicator of the subset with bitmask m."""
    idx = np.arange(1 << n, dtype=np.int64)
    return ((idx[:, None] >> np.arange(n)) & 1).astype(np.float64)


def _contract(T: np.ndarray, vectors: list[np.ndarray]) -> np.ndarray:
    """Contract the leading axes of T with `vectors`, in order."""
    out = T
    for vec in vectors:
        out = np.tensordot(vec, out, axes=(0, 0))
    return out


def _dot_chunk(args):
    T, n, k, a, b, prefix, pbits = args
    r = k - 2
    lb = r * n - pbits
    S = _subset_matrix(n)
    sizes = S.sum(axis=1).astype(np.int64)
    base = prefix << lb
    masks = [(base >> ((r - 1 - j) * n)) & ((1 << n) - 1) for j in range(r)]
    inds = [np.array([(m >> v) & 1 for v in range(n)], dtype=np.int64) for m in masks]
    W = _contract(T, inds).astype(np.float64)  # axes: (last outer set, inner vertex)
    best = None
    for g in range(1 << lb):
        if g:
            t = (g & -g).bit_length() - 1
            j, x = r - 1 - t // n, t % n
            sign = -1 if masks[j] >> x & 1 else 1
            masks[j] ^= 1 << x
            inds[j][x] += sign
            others = inds[:j] + inds[j + 1:]
            W += sign * _contract(np.take(T, x, axis=j), others)
        outer = prod(popcount(m) for m in masks)
        E = np.rint(S @ W).astype(np.int64)
        marg = b * E - a * outer * sizes[:, None]
        vals = np.minimum(marg, 0).sum(axis=1)
        i = int(np.argmin(vals))
        key = (int(vals[i]), base | (g ^ (g >> 1)), i)
        if best is None or key < best:
            best = key
    return best


def dot_min_slack_exact(H: Hypergraph, p, budget_bits: int = DOT_BUDGET_BITS,
                        workers: int = 1) -> SlackReport:
    """Exact minimum of the dot slack over all choices of X_1..X_k.

    Ties are broken towards the lexicographically smallest
    (X_1, ..., X_{k-1}) as bitmasks, so the witness does not depend on
    the enumeration order or on `workers`.
    """
    a, b, p = _scaled(p)
    n, k = H.n, H.k
    if (k - 1) * n > budget_bits:
        raise BudgetExceeded(
            f"dot exact enumeration needs 2^{(k - 1) * n} subset tuples; budget is 2^{budget_bits}"
        )
    if n == 0:
        return SlackReport("dot", p, n, k, Fraction(0), {"sets": [[] for _ in range(k)]}, "exact")
    if k == 1:
        # single quantified set: the threshold rule alone is exact
        best_sets = [[v for v in range(n) if b * H.has_edge((v,)) < a]]
        val = dot_value(H, p, best_sets)
        return SlackReport("dot", p, n, k, val, {"sets": best_sets}, "exact")
    T = edge_tensor(H)
    r = k - 2
    bits = r * n
    pbits = 0
    if workers > 1:
        pbits = min(bits, max(1, (4 * workers - 1).bit_length()))
    chunks = [(T, n, k, a, b, pre, pbits) for pre in range(1 << pbits)]
    val, code, last = min(map_chunks(_dot_chunk, chunks, workers))
    outer = [(code >> ((r - 1 - j) * n)) & ((1 << n) - 1) for j in range(r)]
    sets = [list(members(m)) for m in outer] + [list(members(last))]
    size_prod = prod(len(s) for s in sets)
    inner = []
    for v in range(n):
        cnt = dot_count(H, sets + [[v]])
        if b * cnt - a * size_prod < 0:
            inner.append(v)
    sets.append(inner)
    slack = Fraction(val, b)
    return SlackReport("dot", p, n, k, slack, {"sets": sets}, "exact")


# -- exact edge -------------------------------------------------------------------

def _link_matrix(H: Hypergraph) -> tuple[np.ndarray, list[tuple[int, ...]]]:
    sets = list(combinations(range(H.n), H.k - 1))
    L = np.zeros((H.n, len(sets)), dtype=np.float64)
    for j, S in enumerate(sets):
        lm = H.link_index.get(S, 0)
        for x in members(lm):
            L[x, j] = 1.0
    return L, sets


def _degenerate_count(n: int, k: int) -> int:
    return n ** (k - 1) - perm(n, k - 1)


def _edge_chunk(args):
    L, n, k, a, b, lo, hi, degenerate = args
    S = _subset_matrix(n)[lo:hi]
    sizes = S.sum(axis=1).astype(np.int64)
    D = np.rint(S @ L).astype(np.int64)
    marg = b * D - a * sizes[:, None]
    vals = factorial(k - 1) * np.minimum(marg, 0).sum(axis=1)
    if degenerate:
        vals = vals - _degenerate_count(n, k) * a * sizes
    i = int(np.argmin(vals))
    return (int(vals[i]), lo + i)


def edge_min_slack_exact(H: Hypergraph, p, budget_n: int = EDGE_BUDGET_N,
                         degenerate: bool = False, workers: int = 1) -> SlackReport:
    """Exact minimum of the edge slack.

    For fixed X the optimal Y keeps exactly the tuples y with
    d_X(y) < p|X|; d_X(y) only depends on the underlying set of y, so every
    (k-1)-set contributes (k-1)! times.
    """
    a, b, p = _scaled(p)
    n, k = H.n, H.k
    if n > budget_n:
        raise BudgetExceeded(f"edge exact enumeration over 2^{n} sets X exceeds budget n <= {budget_n}")
    if n == 0 or k < 2:
        return SlackReport("edge", p, n, k, Fraction(0), {"X": [], "Y_sets": [], "Y_orderings": "all"},
                           "exact", degenerate)
    L, sets = _link_matrix(H)
    total = 1 << n
    chunks = [(L, n, k, a, b, lo, min(total, lo + _EDGE_BLOCK), degenerate)
              for lo in range(0, total, _EDGE_BLOCK)]
    val, xmask = min(map_chunks(_edge_chunk, chunks, workers))
    X = members(xmask)
    sx = len(X)
    Y_sets = [list(S) for S in sets if b * popcount(H.link_index.get(S, 0) & xmask) < a * sx]
    witness = {"X": list(X), "Y_sets": Y_sets, "Y_orderings": "all",
               "Y_degenerate": bool(degenerate and a * sx > 0)}
    return SlackReport("edge", p, n, k, Fraction(val, b), witness, "exact", degenerate)


def edge_witness_tuples(H: Hypergraph, witness: dict) -> list[tuple[int, ...]]:
    """Expand an edge witness into its explicit list of (k-1)-tuples."""
    tuples = {t for S in witness["Y_sets"] for t in permutations(S)}
    if witness.get("Y_degenerate"):
        tuples.update(t for t in product(range(H.n), repeat=H.k - 1) if len(set(t)) < len(t))
    return sorted(tuples)


def evaluate_witness(H: Hypergraph, report: SlackReport) -> Fraction:
    """Re-evaluate a report's witness directly from its definition."""
    w = report.witness
    if report.notion == "dot":
        return dot_value(H, report.p, w["sets"])
    if report.notion == "edge":
        return edge_value(H, report.p, w["X"], edge_witness_tuples(H, w))
    if report.notion == "cherry":
        return cherry_slack(H, report.p, w["P"], w["Q"], report.degenerate)
    raise ValueError(f"unknown notion {report.notion!r}")


# -- sampled adversarial search ------------------------------------------------

class _DotSearch:
    def __init__(self, H: Hypergraph, a: int, b: int):
        self.n, self.k, self.a, self.b = H.n, H.k, a, b
        self.T = edge_tensor(H)

    def value(self, inds: list[np.ndarray]) -> tuple[int, np.ndarray]:
        """Scaled slack of the outer sets with the optimal last set, and that set."""
        E = _contract(self.T, inds)
        outer = prod(int(v.sum()) for v in inds)
        marg = self.b * E - self.a * outer
        return int(np.minimum(marg, 0).sum()), (marg < 0).astype(np.int64)

    def best_response(self, inds: list[np.ndarray], j: int) -> np.ndarray:
        """Threshold set replacing X_j given the other k-1 sets."""
        T = np.moveaxis(self.T, j, -1)
        rest = inds[:j] + inds[j + 1:]
        E = _contract(T, rest)
        outer = prod(int(v.sum()) for v in rest)
        return (self.b * E - self.a * outer < 0).astype(np.int64)


def _sample_dot(H: Hypergraph, a: int, b: int, samples: int, rng: random.Random):
    n, k = H.n, H.k
    search = _DotSearch(H, a, b)
    best = None
    trajectory = []

    def consider(inds):
        nonlocal best
        val, last = search.value(inds)
        sets = [tuple(np.flatnonzero(v).tolist()) for v in inds] + [tuple(np.flatnonzero(last).tolist())]
        key = (val, sets)
        if best is None or key < best:
            best = key
        return val

    for s in range(samples):
        density = 0.5 if s % 2 == 0 else rng.random()
        inds = [np.array([1 if rng.random() < density else 0 for _ in range(n)], dtype=np.int64)
                for _ in range(k - 1)]
        consider(inds)
        # alternating threshold responses over all k sets
        full = inds + [search.value(inds)[1]]
        for _ in range(4 * k):
            changed = False
            for j in range(k):
                nxt = search.best_response(full, j)
                if not np.array_equal(nxt, full[j]):
                    full[j] = nxt
                    changed = True
            if not changed:
                break
        inds = full[:-1]
        cur = consider(inds)
        # single-element toggles of the outer sets, last set re-optimised
        improved = True
        while improved:
            improved = False
            for j in range(k - 1):
                for x in range(n):
                    inds[j][x] ^= 1
                    val = consider(inds)
                    if val < cur:
                        cur = val
                        improved = True
                    else:
                        inds[j][x] ^= 1
        trajectory.append(Fraction(best[0], b))
    val, sets = best
    return Fraction(val, b), {"sets": [list(s) for s in sets]}, trajectory


def _sample_edge(H: Hypergraph, a: int, b: int, samples: int, rng: random.Random, degenerate: bool):
    n, k = H.n, H.k
    L, sets = _link_matrix(H)
    L = L.astype(np.int64)
    mult = factorial(k - 1)
    ndeg = _degenerate_count(n, k) if degenerate else 0
    best = None
    trajectory = []

    def value(ind):
        sx = int(ind.sum())
        marg = b * (ind @ L) - a * sx
        return mult * int(np.minimum(marg, 0).sum()) - ndeg * a * sx

    def consider(ind):
        nonlocal best
        val = value(ind)
        key = (val, tuple(np.flatnonzero(ind).tolist()))
        if best is None or key < best:
            best = key
        return val

    for s in range(samples):
        density = 0.5 if s % 2 == 0 else rng.random()
        ind = np.array([1 if rng.random() < density else 0 for _ in range(n)], dtype=np.int64)
        cur = consider(ind)
        # threshold response for X given the optimal Y, repeated
        for _ in range(2 * n):
            sx = int(ind.sum())
            ymask = (b * (ind @ L) - a * sx < 0).astype(np.int64)
            ycount = mult * int(ymask.sum()) + (ndeg if a * sx > 0 else 0)
            hits = mult * (L @ ymask)
            nxt = (b * hits - a * ycount < 0).astype(np.int64)
            if np.array_equal(nxt, ind):
                break
            ind = nxt
        cur = consider(ind)
        improved = True
        while improved:
            improved = False
            for x in range(n):
                ind[x] ^= 1
                val = consider(ind)
                if val < cur:
                    cur = val
                    improved = True
                else:
                    ind[x] ^= 1
        trajectory.append(Fraction(best[0], b))
    val, X = best
    xmask = to_mask(X)
    Y_sets = [list(S) for S in sets if b * popcount(H.link_index.get(S, 0) & xmask) < a * len(X)]
    witness = {"X": list(X), "Y_sets": Y_sets, "Y_orderings": "all",
               "Y_degenerate": bool(degenerate and a * len(X) > 0)}
    return Fraction(val, b), witness, trajectory


def _sample_cherry(H: Hypergraph, a: int, b: int, samples: int, rng: random.Random, degenerate: bool):
    n, k = H.n, H.k
    T = edge_tensor(H)
    if degenerate:
        allowed = np.ones((n,) * (k - 1), dtype=np.int64)
        chain_ok = np.ones((n,) * k, dtype=np.int64)
    else:
        allowed = np.zeros((n,) * (k - 1), dtype=np.int64)
        for t in permutations(range(n), k - 1):
            allowed[t] = 1
        chain_ok = np.zeros((n,) * k, dtype=np.int64)
        for t in permutations(range(n), k):
            chain_ok[t] = 1
    C = b * T - a * chain_ok  # scaled contribution of each chain
    # value(P, Q) = sum P[x1..x_{k-1}] Q[x2..xk] C[x1..xk]
    idx = "abcdefghij"[:k]
    spec_q = f"{idx[:-1]},{idx}->{idx[1:]}"
    spec_p = f"{idx[1:]},{idx}->{idx[:-1]}"

    def value(P, Q):
        return int(np.einsum(f"{idx[:-1]},{idx[1:]},{idx}->", P, Q, C))

    best = None
    trajectory = []
    for s in range(samples):
        density = 0.5 if s % 2 == 0 else rng.random()
        P = np.array([1 if rng.random() < density else 0 for _ in range(allowed.size)],
                     dtype=np.int64).reshape(allowed.shape) * allowed
        Q = (np.einsum(spec_q, P, C) < 0).astype(np.int64) * allowed
        for _ in range(20):
            P2 = (np.einsum(spec_p, Q, C) < 0).astype(np.int64) * allowed
            Q2 = (np.einsum(spec_q, P2, C) < 0).astype(np.int64) * allowed
            if np.array_equal(P2, P) and np.array_equal(Q2, Q):
                break
            P, Q = P2, Q2
        val = value(P, Q)
        key = (val, tuple(map(tuple, np.argwhere(P).tolist())), tuple(map(tuple, np.argwhere(Q).tolist())))
        if best is None or key < best:
            best = key
        trajectory.append(Fraction(best[0], b))
    val, P, Q = best
    return Fraction(val, b), {"P": [list(t) for t in P], "Q": [list(t) for t in Q]}, trajectory


def sampled_min_slack(H: Hypergraph, p, notion: str, samples: int, seed: int,
                      degenerate: bool = False) -> SlackReport:
    """Heuristic minimum over sampled candidates; an upper bound on the true minimum.

    Each sample starts from random sets (density 1/2 or a random density),
    applies threshold best responses until stable and then single-element
    hill climbing.  Deterministic for a fixed seed.
    """
    if notion not in NOTIONS:
        raise ValueError(f"unknown notion {notion!r}")
    if samples < 1:
        raise ValueError("samples must be at least 1")
    a, b, p = _scaled(p)
    n, k = H.n, H.k
    rng = random.Random(seed)
    if n == 0 or k < 2:
        return SlackReport(notion, p, n, k, Fraction(0), {}, "sampled", degenerate, samples, seed)
    if notion == "dot":
        slack, witness, traj = _sample_dot(H, a, b, samples, rng)
    elif notion == "edge":
        slack, witness, traj = _sample_edge(H, a, b, samples, rng, degenerate)
    else:
        slack, witness, traj = _sample_cherry(H, a, b, samples, rng, degenerate)
    return SlackReport(notion, p, n, k, slack, witness, "sampled",
                       degenerate if notion != "dot" else False, samples, seed, traj)


# -- verdicts ------------------------------------------------------------------

@dataclass
class DenseVerdict:
    dense: bool
    certified: bool
    mu: Fraction
    report: SlackReport

    @property
    def label(self) -> str:
        if self.certified:
            return "dense" if self.dense else "not dense"
        return "not refuted" if self.dense else "refuted"

    def to_dict(self) -> dict:
        out = self.report.to_dict()
        out["mu"] = str(self.mu)
        out["threshold"] = str(-self.mu * self.report.n ** self.report.k)
        out["verdict"] = self.label
        out["certified"] = self.certified
        return out


def is_dense(H: Hypergraph, p, mu, notion: str = "dot", mode: str = "exact", *,
             samples: int = 64, seed: int | None = None, degenerate: bool = False,
             workers: int = 1, budget_bits: int = DOT_BUDGET_BITS,
             budget_n: int = EDGE_BUDGET_N) -> DenseVerdict:
    """H is (p, mu, notion)-dense iff the minimum slack is >= -mu n^k.

    In sampled mode a True verdict only means "not refuted".
    """
    mu = Fraction(mu)
    if mode == "exact":
        if notion == "dot":
            rep = dot_min_slack_exact(H, p, budget_bits, workers)
        elif notion == "edge":
            rep = edge_min_slack_exact(H, p, budget_n, degenerate, workers)
        elif notion == "cherry":
            raise ValueError("the cherry notion has no exact mode; use sampled mode")
        else:
            raise ValueError(f"unknown notion {notion!r}")
    elif mode == "sampled":
        if seed is None:
            raise ValueError("sampled mode needs an explicit seed")
        rep = sampled_min_slack(H, p, notion, samples, seed, degenerate)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    ok = rep.slack >= -mu * H.n ** H.k
    return DenseVerdict(ok, mode == "exact", mu, rep)
