"""Shared generators for the test suite."""

import random
from fractions import Fraction

from drx.graphs import enumerate_stable_graphs
from drx.strata import Decoration, normalize


def deco(graph, legs=None, halfedges=None, edges=None, vertices=None):
    base = Decoration.trivial(graph)
    return Decoration(
        tuple(legs) if legs is not None else base.legs,
        tuple(halfedges) if halfedges is not None else base.halfedges,
        tuple(edges) if edges is not None else base.edges,
        tuple(vertices) if vertices is not None else base.vertices,
    )


def random_class(rng: random.Random, amb, max_deg: int):
    """A few random psi-decorated graphs of codimension at most max_deg."""
    graphs = enumerate_stable_graphs(amb.g, amb.n, amb.beta, amb.target, max_deg)
    raw = []
    for _ in range(rng.randint(1, 3)):
        G = rng.choice(graphs)
        budget = rng.randint(0, max_deg - G.num_edges)
        legs = [[0, 0] for _ in range(G.n)]
        hes = [[0, 0] for _ in range(G.num_edges)]
        slots = [("l", i) for i in range(G.n)] + [("h", e) for e in range(G.num_edges)]
        for _ in range(budget if slots else 0):
            kind, i = rng.choice(slots)
            if kind == "l":
                legs[i][0] += 1
            else:
                hes[i][rng.randint(0, 1)] += 1
        d = deco(G, legs=[tuple(x) for x in legs], halfedges=[tuple(x) for x in hes])
        raw.append((G, d, Fraction(rng.randint(-3, 3), rng.randint(1, 3))))
    return normalize(amb, raw)


def codims(cls):
    return {dg.codim for dg, _ in cls.terms}
