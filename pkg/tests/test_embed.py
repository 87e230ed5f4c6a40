import random
from fractions import Fraction
from itertools import combinations

import pytest
from hypothesis import given, settings, strategies as st

from khg.constructions import K4_MINUS, binomial, catalog, complete, triangle_cone
from khg.core import Hypergraph, induced
from khg.embed import (common_neighbourhood, copies, copy_vertex_sets, count_copies, cover_check,
                       embeddings, good_pair, good_partner_exists, iter_embeddings,
                       measure_hypotheses, reachable_count)
from khg.parallel import BudgetExceeded

from oracles import copy_sets, good_common_sets, has_factor_bruteforce, labeled_embeddings


@st.composite
def small_3graphs(draw, min_n=4, max_n=7):
    n = draw(st.integers(min_value=min_n, max_value=max_n))
    triples = list(combinations(range(n), 3))
    mask = draw(st.integers(min_value=0, max_value=(1 << len(triples)) - 1))
    return Hypergraph(3, n, [t for i, t in enumerate(triples) if mask >> i & 1])


patterns = st.sampled_from(["edge", "K4-", "matching(2)", "K_{1,1,2}"])


def test_k4_minus_copies_in_k4():
    H = complete(4, 3)
    assert count_copies(K4_MINUS, H) == 4
    assert count_copies(K4_MINUS, H, labeled=True) == 24


def test_embeddings_limit():
    res = embeddings(K4_MINUS, complete(5, 3), limit=7)
    assert len(res.embeddings) == 7 and not res.exhaustive
    res = embeddings(K4_MINUS, complete(4, 3))
    assert len(res.embeddings) == 24 and res.exhaustive
    assert all(e.is_valid(K4_MINUS, complete(4, 3)) for e in res.embeddings)


def test_cover_check_triangle_cone_misses_z():
    for seed in range(5):
        H = triangle_cone(12, Fraction(1, 2), seed)
        assert H.n - 1 in cover_check(catalog("K_{2,2,2}"), H)


def test_cover_check_complete():
    assert cover_check(K4_MINUS, complete(6, 3)) == ()
    assert cover_check(K4_MINUS, Hypergraph(3, 5, [(0, 1, 2)])) == (0, 1, 2, 3, 4)


def test_good_pair_complete():
    rep = good_pair(complete(10, 3), 0, 1, Fraction(1, 10))
    # common neighbourhood: the C(8, 2) pairs avoiding 0 and 1, each of degree 8 >= 1
    assert rep.common_count == 28 and rep.good_set_count == 28
    assert rep.good  # 28 >= 0.1 * 100
    assert not good_pair(complete(10, 3), 0, 1, Fraction(3, 10)).good


def test_good_partner_complete():
    rep = good_partner_exists(complete(8, 3), 3, Fraction(1, 100))
    assert rep.partner == 0
    assert rep.hypotheses.alpha == 1


def test_measured_hypotheses_complete():
    hyp = measure_hypotheses(complete(8, 3))
    assert hyp.alpha == 1 and hyp.alpha_prime == Fraction(6, 8)
    assert hyp.holds
    assert hyp.eta_bound(3) == Fraction(1 * 6, 8 * 4 * 6)


def test_triangle_cone_z_has_no_partner():
    H = triangle_cone(13, Fraction(1, 2), 3)
    z = H.n - 1
    for w in range(z):
        assert common_neighbourhood(H, z, w) == []
    assert good_partner_exists(H, z, Fraction(1, 10**6)).partner is None


def test_reach_complete_single_edge():
    rep = reachable_count(complete(8, 3), catalog("edge"), 0, 1, 1)
    assert rep.count == 15 and not rep.truncated


def test_reach_limit_and_budget():
    rep = reachable_count(complete(8, 3), catalog("edge"), 0, 1, 1, limit=4)
    assert rep.count == 4 and rep.truncated
    with pytest.raises(BudgetExceeded):
        reachable_count(complete(8, 3), catalog("edge"), 0, 1, 2, budget=5)


def test_reach_two_copies_matches_oracle():
    H = binomial(9, 3, Fraction(7, 10), 4)
    F = catalog("edge")
    rep = reachable_count(H, F, 0, 1, 2)
    count = 0
    for W in combinations(range(2, 9), 5):
        if all(has_factor_bruteforce(F, induced(H, (x, *W))) for x in (0, 1)):
            count += 1
    assert rep.count == count


def test_reach_workers_agree():
    H = binomial(10, 3, Fraction(3, 5), 9)
    a = reachable_count(H, catalog("K4-"), 2, 5, 1, workers=1)
    b = reachable_count(H, catalog("K4-"), 2, 5, 1, workers=2)
    assert a == b


@settings(max_examples=50, deadline=None)
@given(small_3graphs(), patterns)
def test_embeddings_match_oracle(H, name):
    F = catalog(name)
    if F.n > H.n:
        return
    mine = sorted(e.mapping for e in iter_embeddings(F, H))
    assert mine == sorted(labeled_embeddings(F, H))
    unl = {(frozenset(c.vertices), frozenset(frozenset(e) for e in c.edges)) for c in copies(F, H)}
    assert unl == copy_sets(F, H)


@settings(max_examples=50, deadline=None)
@given(small_3graphs(), patterns, st.sampled_from(["subsets", "embeddings", "auto"]))
def test_copy_vertex_sets_strategies(H, name, strategy):
    F = catalog(name)
    expect = {c for c, _ in copy_sets(F, H)}
    for pivot in range(H.n):
        got = copy_vertex_sets(F, H, pivot, H.all_vertices, strategy)
        assert {frozenset(v for v in range(H.n) if m >> v & 1) for m in got} == {
            c for c in expect if pivot in c}
        for mask, emb in got.items():
            assert emb.mask == mask and emb.is_valid(F, H)


@settings(max_examples=40, deadline=None)
@given(small_3graphs(), patterns)
def test_cover_check_matches_oracle(H, name):
    F = catalog(name)
    covered = set().union(*[c for c, _ in copy_sets(F, H)]) if F.n <= H.n else set()
    assert cover_check(F, H) == tuple(v for v in range(H.n) if v not in covered)


@settings(max_examples=40, deadline=None)
@given(small_3graphs(), st.sampled_from([Fraction(0), Fraction(1, 10), Fraction(1, 3)]))
def test_good_pair_matches_oracle(H, eta):
    for u, v in [(0, 1), (1, 3), (2, 3)]:
        assert good_pair(H, u, v, eta).good_set_count == good_common_sets(H, u, v, eta)


def test_partner_soundness_random():
    rng = random.Random(3)
    for _ in range(10):
        H = binomial(10, 3, Fraction(rng.randint(5, 9), 10), rng.randint(0, 999))
        for v in range(H.n):
            rep = good_partner_exists(H, v, Fraction(1, 50))
            if rep.partner is not None:
                assert good_common_sets(H, rep.partner, v, Fraction(1, 50)) >= Fraction(1, 50) * 100
            else:
                assert all(good_common_sets(H, u, v, Fraction(1, 50)) < 2 for u in range(H.n) if u != v)


@settings(max_examples=40, deadline=None)
@given(small_3graphs(min_n=5, max_n=8))
def test_reach_symmetry_and_closed_form(H):
    F = catalog("edge")
    for u, v in [(0, 1), (2, 4)]:
        fwd = reachable_count(H, F, u, v, 1)
        back = reachable_count(H, F, v, u, 1)
        assert fwd == back
        assert fwd.count == len(common_neighbourhood(H, u, v))
        assert good_pair(H, u, v, Fraction(1, 10)) == good_pair(H, v, u, Fraction(1, 10))


@settings(max_examples=30, deadline=None)
@given(small_3graphs())
def test_good_count_antitone_in_eta(H):
    counts = [good_pair(H, 0, 1, Fraction(e, 20)).good_set_count for e in range(0, 21, 2)]
    assert counts == sorted(counts, reverse=True)


@pytest.mark.parametrize("seed", range(5))
def test_triangle_cone_z_counts_zero(seed):
    H = triangle_cone(11, Fraction(2, 5), seed)
    z = H.n - 1
    for w in range(z):
        assert good_pair(H, z, w, 0).good_set_count == 0
