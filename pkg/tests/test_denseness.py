from fractions import Fraction
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from khg.constructions import binomial, complete
from khg.core import Hypergraph
from khg.denseness import (DenseVerdict, cherry_slack, dot_min_slack_exact, edge_min_slack_exact,
                           edge_tensor, evaluate_witness, is_dense, sampled_min_slack)
from khg.parallel import BudgetExceeded

from oracles import naive_dot_min, tiny_edge_min, tuple_edge_min

HALF = Fraction(1, 2)
SINGLE = Hypergraph(3, 3, [(0, 1, 2)])


@st.composite
def small_3graphs(draw, max_n=6):
    n = draw(st.integers(min_value=1, max_value=max_n))
    triples = list(combinations(range(n), 3))
    mask = draw(st.integers(min_value=0, max_value=(1 << len(triples)) - 1)) if triples else 0
    return Hypergraph(3, n, [t for i, t in enumerate(triples) if mask >> i & 1])


densities = st.sampled_from([Fraction(0), Fraction(1, 3), HALF, Fraction(2, 3), Fraction(1)])


# -- frozen examples (each value computed by the brute-force oracles) -----------

def test_dot_complete_k4_p1():
    rep = dot_min_slack_exact(complete(4, 3), 1)
    # all 2^12 triples enumerated: X1 = X2 = X3 = V gives 24 - 64
    assert rep.slack == -40
    assert rep.witness["sets"] == [[0, 1, 2, 3]] * 3


def test_dot_empty_p0():
    assert dot_min_slack_exact(Hypergraph(3, 3), 0).slack == 0


def test_dot_single_edge_half():
    rep = dot_min_slack_exact(SINGLE, HALF)
    assert rep.slack == Fraction(-15, 2)
    assert rep.witness["sets"] == [[0, 1, 2]] * 3


def test_edge_empty_half():
    rep = edge_min_slack_exact(Hypergraph(3, 3), HALF)
    assert rep.slack == -9
    assert rep.witness["X"] == [0, 1, 2]


def test_edge_p0():
    assert edge_min_slack_exact(binomial(7, 3, HALF, 1), 0).slack == 0


def test_edge_complete_k4_p1():
    assert edge_min_slack_exact(complete(4, 3), 1).slack == -24
    assert edge_min_slack_exact(complete(4, 3), 1, degenerate=True).slack == -40


def test_cherry_examples():
    H = Hypergraph(3, 4, [(0, 1, 2)])
    assert cherry_slack(H, HALF, [], []) == 0
    assert cherry_slack(H, 1, [(0, 1)], [(1, 2)]) == 0
    assert cherry_slack(H, 1, [(0, 1)], [(1, 3)]) == -1


def test_cherry_rejects_malformed():
    H = Hypergraph(3, 4, [(0, 1, 2)])
    with pytest.raises(ValueError):
        cherry_slack(H, 1, [(0, 1, 2)], [])
    with pytest.raises(ValueError):
        cherry_slack(H, 1, [(0, 9)], [])
    with pytest.raises(ValueError):
        cherry_slack(H, 1, [(1, 1)], [])
    # repeated entries are admitted with the degenerate flag; the chain (1,1,2) is no edge
    assert cherry_slack(H, 1, [(1, 1)], [(1, 2)], degenerate=True) == -1


def test_is_dense_examples():
    assert is_dense(Hypergraph(3, 5), 0, Fraction(1, 100)).dense
    v = is_dense(SINGLE, HALF, Fraction(1, 5))
    assert not v.dense and v.report.slack == Fraction(-15, 2)
    # -40 < -0.05 * 4^3 = -3.2, so the complete 4-vertex graph is not (1, 0.05)-dense
    assert not is_dense(complete(4, 3), 1, Fraction(1, 20)).dense
    assert is_dense(complete(4, 3), 1, Fraction(5, 8)).dense


def test_dot_budget_refusal():
    with pytest.raises(BudgetExceeded):
        dot_min_slack_exact(Hypergraph(3, 14), HALF)
    with pytest.raises(BudgetExceeded):
        edge_min_slack_exact(Hypergraph(3, 21), HALF)


def test_cherry_has_no_exact_mode():
    with pytest.raises(ValueError):
        is_dense(SINGLE, HALF, 0, notion="cherry", mode="exact")


def test_sampled_needs_seed():
    with pytest.raises(ValueError):
        is_dense(SINGLE, HALF, 0, mode="sampled")


def test_sampled_verdict_label():
    v = is_dense(complete(6, 3), HALF, 1, mode="sampled", seed=1, samples=3)
    assert isinstance(v, DenseVerdict)
    assert v.label == "not refuted" and not v.certified


def test_default_convention_breaks_hierarchy():
    # with distinct tuples only, edge slack can exceed dot slack
    assert edge_min_slack_exact(SINGLE, HALF).slack == -3
    assert dot_min_slack_exact(SINGLE, HALF).slack == Fraction(-15, 2)
    assert tiny_edge_min(SINGLE, HALF) == -3


def test_gray_walk_for_k4():
    H = binomial(5, 4, HALF, 2)
    rep = dot_min_slack_exact(H, Fraction(1, 3))
    assert evaluate_witness(H, rep) == rep.slack
    # every quadruple of subsets at once
    S = np.array([[m >> v & 1 for v in range(5)] for m in range(32)])
    counts = np.einsum("ai,bj,ck,dl,ijkl->abcd", S, S, S, S, edge_tensor(H))
    z = S.sum(axis=1)
    vols = np.einsum("a,b,c,d->abcd", z, z, z, z)
    assert rep.slack == Fraction(int((3 * counts - vols).min()), 3)


# -- properties --------------------------------------------------------------------

@settings(max_examples=40, deadline=None)
@given(small_3graphs(), densities)
def test_dot_matches_full_enumeration(H, p):
    rep = dot_min_slack_exact(H, p)
    assert rep.slack == naive_dot_min(H, p)
    assert evaluate_witness(H, rep) == rep.slack


@settings(max_examples=40, deadline=None)
@given(small_3graphs(), densities, st.booleans())
def test_edge_matches_tuple_scan(H, p, degenerate):
    rep = edge_min_slack_exact(H, p, degenerate=degenerate)
    assert rep.slack == tuple_edge_min(H, p, degenerate)
    assert evaluate_witness(H, rep) == rep.slack


@settings(max_examples=15, deadline=None)
@given(small_3graphs(max_n=3), densities)
def test_edge_matches_all_y_enumeration(H, p):
    assert edge_min_slack_exact(H, p).slack == tiny_edge_min(H, p)


@settings(max_examples=40, deadline=None)
@given(small_3graphs(), densities)
def test_hierarchy_with_degenerate_tuples(H, p):
    assert edge_min_slack_exact(H, p, degenerate=True).slack <= dot_min_slack_exact(H, p).slack


@settings(max_examples=25, deadline=None)
@given(small_3graphs(), densities, st.sampled_from(["dot", "edge"]), st.integers(0, 2**16))
def test_sampled_is_upper_bound(H, p, notion, seed):
    rep = sampled_min_slack(H, p, notion, 4, seed)
    exact = (dot_min_slack_exact if notion == "dot" else edge_min_slack_exact)(H, p)
    assert rep.slack >= exact.slack
    assert evaluate_witness(H, rep) == rep.slack


@settings(max_examples=25, deadline=None)
@given(small_3graphs(), densities, st.integers(0, 2**16))
def test_sampled_cherry_witness_and_determinism(H, p, seed):
    a = sampled_min_slack(H, p, "cherry", 3, seed)
    b = sampled_min_slack(H, p, "cherry", 3, seed)
    assert a.slack == b.slack and a.witness == b.witness
    assert evaluate_witness(H, a) == a.slack


@settings(max_examples=25, deadline=None)
@given(small_3graphs(), st.sampled_from([Fraction(1, 4), HALF, Fraction(3, 4)]))
def test_is_dense_monotone(H, p):
    mus = [Fraction(0), Fraction(1, 50), Fraction(1, 10), Fraction(1, 2), Fraction(1)]
    verdicts = [is_dense(H, p, mu).dense for mu in mus]
    assert verdicts == sorted(verdicts)
    ps = [Fraction(0), Fraction(1, 4), HALF, Fraction(3, 4), Fraction(1)]
    verdicts = [is_dense(H, q, Fraction(1, 20)).dense for q in ps]
    assert verdicts == sorted(verdicts, reverse=True)


def test_workers_do_not_change_result():
    H = binomial(9, 3, HALF, 5)
    one = dot_min_slack_exact(H, Fraction(2, 5), workers=1)
    two = dot_min_slack_exact(H, Fraction(2, 5), workers=2)
    assert (one.slack, one.witness) == (two.slack, two.witness)
    e1 = edge_min_slack_exact(binomial(15, 3, HALF, 5), HALF, workers=1)
    e2 = edge_min_slack_exact(binomial(15, 3, HALF, 5), HALF, workers=2)
    assert (e1.slack, e1.witness) == (e2.slack, e2.witness)


def test_sampled_bound_on_larger_graph():
    H = binomial(30, 3, HALF, 7)
    rep = sampled_min_slack(H, HALF, "dot", 2, seed=11)
    assert rep == sampled_min_slack(H, HALF, "dot", 2, seed=11)
    assert evaluate_witness(H, rep) == rep.slack
    # the threshold inner set never contributes positive terms
    assert rep.slack <= 0
