import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from drx.exact import RPolynomial
from drx.graphs import StableGraph, enumerate_stable_graphs
from drx.oracle import naive_weightings
from drx.target import TargetModel
from drx.weightings import (
    IncompatibleDataError,
    WeightIntegrand,
    default_r_min,
    enumerate_weightings,
    sum_over_weightings_enum,
    sum_over_weightings_tree,
    weighting_polynomial,
)

POINT = TargetModel.point()
LOOP_WITH_LEGS = StableGraph((1,), ((),), (0, 0), ((0, 0),))
BARE_LOOP = StableGraph((1,), ((),), (), ((0, 0),))
TREE = StableGraph((0, 0), ((), ()), (0, 0, 1), ((0, 1),))


def test_tree_has_unique_weighting():
    for r in (2, 3, 7, 11):
        assert len(enumerate_weightings(TREE, (2, 3, -5), POINT, r)) == 1


def test_loop_has_r_weightings():
    assert len(enumerate_weightings(LOOP_WITH_LEGS, (1, -1), POINT, 5)) == 5


def test_tree_weighting_values():
    (w,) = enumerate_weightings(TREE, (2, 3, -5), POINT, 7)
    assert w.halfedges == (2, 5)
    assert w.legs == (2, 3, 2)


def test_weighting_sums_from_examples():
    one = WeightIntegrand.constant(2)
    lin = WeightIntegrand.from_dict(2, {((1, 0), 0): 1})
    prod = WeightIntegrand.edge_products(1, (1,))
    for summer in (sum_over_weightings_enum, sum_over_weightings_tree):
        assert summer(LOOP_WITH_LEGS, (1, -1), POINT, one, 5) == 5
        assert summer(BARE_LOOP, (), POINT, lin, 5) == 10
        assert summer(BARE_LOOP, (), POINT, prod, 5) == 20
        for r in range(2, 12):
            assert summer(BARE_LOOP, (), POINT, lin, r) == Fraction(r * (r - 1), 2)


def test_weighting_polynomial_examples():
    one = WeightIntegrand.constant(2)
    prod = WeightIntegrand.edge_products(1, (1,))
    assert weighting_polynomial(BARE_LOOP, (), POINT, one, 3, 1) == RPolynomial([0, 1])
    p = weighting_polynomial(BARE_LOOP, (), POINT, prod, 3, 3)
    assert p == RPolynomial([0, Fraction(-1, 6), 0, Fraction(1, 6)])
    # tree edge: the side at the (2,3) vertex is r - 5, the far side 5
    q = weighting_polynomial(TREE, (2, 3, -5), POINT, prod, 7, 1)
    assert q == RPolynomial([-25, 5])
    assert [q(r) for r in range(7, 14)] == [5 * (r - 5) for r in range(7, 14)]


def test_incompatible_data():
    with pytest.raises(IncompatibleDataError, match="incompatible ramification data"):
        enumerate_weightings(TREE, (1, 1, 1), POINT, 5)


def test_counts_match_half_edge_scan():
    rng = random.Random(3)
    for G in enumerate_stable_graphs(2, 2, (), POINT, 3):
        A = (1, -1)
        r = rng.choice((2, 3, 4))
        fast = sorted(w.halfedges for w in enumerate_weightings(G, A, POINT, r))
        slow = sorted(naive_weightings(G, A, POINT, r))
        assert fast == slow


def test_curve_class_targets():
    t = TargetModel.free((2,))
    G = StableGraph((0, 1), ((1,), (0,)), (0, 1), ((0, 1),))
    for r in (5, 7):
        ws = enumerate_weightings(G, (3, -1), t, r)
        assert len(ws) == 1
        # vertex 0 carries pairing 2 and leg 3, so w = -1 mod r
        assert ws[0].halfedges == (r - 1, 1)


def test_default_r_min():
    assert default_r_min((1, -1), POINT, ()) == 3
    assert default_r_min((3, -1), TargetModel.free((2,)), (1,)) == 11


def _random_integrand(rng, nh):
    data = {}
    for _ in range(rng.randint(1, 3)):
        exps = tuple(rng.randint(0, 2) for _ in range(nh))
        data[(exps, rng.randint(0, 1))] = Fraction(rng.randint(-5, 5), rng.randint(1, 4))
    return WeightIntegrand.from_dict(nh, data)


GRAPH_POOL = [
    G
    for g, n in ((1, 2), (2, 1), (2, 2), (1, 3))
    for G in enumerate_stable_graphs(g, n, (), POINT, 3)
    if G.h1 <= 2
]


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**9))
def test_enum_and_tree_agree(seed):
    rng = random.Random(seed)
    G = rng.choice(GRAPH_POOL)
    A = [rng.randint(-3, 3) for _ in range(G.n - 1)]
    A.append(-sum(A))
    F = _random_integrand(rng, 2 * G.num_edges)
    r = rng.randint(2, 11)
    assert sum_over_weightings_enum(G, A, POINT, F, r) == sum_over_weightings_tree(G, A, POINT, F, r)
