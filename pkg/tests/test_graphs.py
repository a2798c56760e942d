import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from drx.graphs import (
    StableGraph,
    automorphism_count,
    canonicalize,
    contract,
    enumerate_stable_graphs,
    first_betti,
    graph_from_dict,
    graph_to_dict,
    isomorphisms,
    render_graph,
    validate,
)
from drx.oracle import _same_graph, brute_force_automorphisms, naive_stable_graphs
from drx.target import TargetModel

POINT = TargetModel.point()
RANK1 = TargetModel.free((1,))


def relabel(G: StableGraph, rng: random.Random) -> StableGraph:
    """Random vertex permutation, edge reordering and edge flips."""
    nv = G.num_vertices
    perm = list(range(nv))
    rng.shuffle(perm)
    inv = [0] * nv
    for old, new in enumerate(perm):
        inv[new] = old
    edges = [(perm[a], perm[b]) if rng.random() < 0.5 else (perm[b], perm[a]) for a, b in G.edges]
    rng.shuffle(edges)
    return StableGraph(
        tuple(G.genera[inv[v]] for v in range(nv)),
        tuple(G.classes[inv[v]] for v in range(nv)),
        tuple(perm[v] for v in G.legs),
        tuple(edges),
    )


def small_cases():
    for g in range(3):
        for n in range(4):
            if 2 * g - 2 + n > 0:
                yield g, n


def test_counts_from_examples():
    assert len(enumerate_stable_graphs(0, 3, (), POINT, 3)) == 1
    assert len(enumerate_stable_graphs(1, 1, (), POINT, 1)) == 2
    assert len(enumerate_stable_graphs(2, 0, (), POINT, 3)) == 7


def test_automorphism_examples():
    assert automorphism_count(StableGraph.smooth(2, 0)) == 1
    assert automorphism_count(StableGraph((1,), ((),), (), ((0, 0),))) == 2
    two_bridges = StableGraph((1, 1), ((), ()), (), ((0, 1), (0, 1)))
    assert automorphism_count(two_bridges) == brute_force_automorphisms(two_bridges)


@pytest.mark.parametrize("g,n", list(small_cases()))
def test_enumeration_matches_naive_oracle(g, n):
    # labelled generation explodes beyond three edges at genus two
    cap = min(3 * g - 3 + n, 3)
    fast = enumerate_stable_graphs(g, n, (), POINT, cap)
    slow = naive_stable_graphs(g, n, (), POINT, cap)
    assert len(fast) == len(slow)
    for G in slow:
        assert sum(_same_graph(G, H) for H in fast) == 1


def test_enumeration_with_curve_class_matches_oracle():
    for g, n, beta in [(0, 2, (1,)), (1, 1, (1,)), (0, 3, (2,)), (1, 0, (2,))]:
        fast = enumerate_stable_graphs(g, n, beta, RANK1, 3)
        slow = naive_stable_graphs(g, n, beta, RANK1, 3)
        assert len(fast) == len(slow), (g, n, beta)


@pytest.mark.parametrize("g,n", list(small_cases()))
def test_automorphisms_match_brute_force(g, n):
    for G in enumerate_stable_graphs(g, n, (), POINT, 3):
        assert automorphism_count(G) == brute_force_automorphisms(G)
        assert sum(1 for _ in isomorphisms(G, G)) == automorphism_count(G)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_canonical_form_invariant_under_relabelling(seed):
    rng = random.Random(seed)
    graphs = enumerate_stable_graphs(2, 2, (), POINT, 4)
    G = rng.choice(graphs)
    H = relabel(G, rng)
    assert canonicalize(G).key == canonicalize(H).key
    assert automorphism_count(H) == automorphism_count(G)


def test_enumeration_is_deterministic_and_canonical():
    a = enumerate_stable_graphs(2, 1, (), POINT, 4)
    b = enumerate_stable_graphs(2, 1, (), POINT, 4)
    assert a == b
    assert len({canonicalize(G).key for G in a}) == len(a)
    for G in a:
        assert validate(G, 2, 1, (), POINT) == []


def test_validate_examples():
    assert validate(StableGraph.smooth(1, 2), 1, 2, (), POINT) == []
    unstable = StableGraph((0, 1), ((), ()), (0, 1), ((0, 1),))
    assert "stability" in validate(unstable, 1, 2, (), POINT)
    disconnected = StableGraph((1, 1), ((), ()), (0, 1), ())
    assert "connected" in validate(disconnected, 1, 2, (), POINT)


def test_curve_class_stabilizes_vertex():
    G = StableGraph((0, 0), ((1,), (0,)), (0, 1, 1), ((0, 1),))
    assert validate(G, 0, 3, (1,), RANK1) == []


def test_first_betti_examples():
    assert first_betti(StableGraph((0, 0), ((), ()), (0, 0, 1, 1), ((0, 1),))) == 0
    assert first_betti(StableGraph((0,), ((),), (0,), ((0, 0),))) == 1
    assert first_betti(StableGraph((0, 0), ((), ()), (), ((0, 1),) * 3)) == 2


def test_contract_keeps_genus():
    for G in enumerate_stable_graphs(2, 1, (), POINT, 3):
        for keep in range(G.num_edges + 1):
            H, vmap, emap = contract(G, list(range(keep)))
            assert H.genus == 2 and H.num_edges == keep


def test_serialization_round_trip():
    for G in enumerate_stable_graphs(2, 2, (), POINT, 3):
        H = graph_from_dict(graph_to_dict(G))
        assert canonicalize(H).key == canonicalize(G).key
        assert render_graph(G)


def test_graph_rejects_missing_vertex():
    with pytest.raises(ValueError, match="missing vertex"):
        StableGraph((0,), ((),), (0, 1), ((0, 0),))
