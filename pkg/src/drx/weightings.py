"""Weightings mod r on stable graphs and exact sums of polynomial integrands over them."""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

from .exact import PolynomialityError, RPolynomial, interpolate_polynomial
from .graphs import StableGraph
from .target import CurveClass, TargetModel, pair_c1S, summand_bound_b

log = logging.getLogger(__name__)


class IncompatibleDataError(ValueError):
    """The ramification data does not sum to the pairing of the curve class."""


@dataclass(frozen=True)
class Weighting:
    r: int
    legs: tuple[int, ...]
    halfedges: tuple[int, ...]  # value of side s of edge e at index 2e+s

    def edge_product(self, e: int) -> int:
        return self.halfedges[2 * e] * self.halfedges[2 * e + 1]


@dataclass(frozen=True)
class WeightIntegrand:
    """Polynomial in the half-edge weights w_{2e+s} and r.

    ``terms`` maps ``(exponents, r_exponent)`` to a rational coefficient, with
    one exponent per non-leg half-edge.
    """

    num_halfedges: int
    terms: tuple[tuple[tuple[tuple[int, ...], int], Fraction], ...]

    @classmethod
    def from_dict(cls, num_halfedges: int, data: dict) -> "WeightIntegrand":
        clean = []
        for (exps, rexp), c in sorted(data.items()):
            if len(exps) != num_halfedges:
                raise ValueError("exponent vector has the wrong length")
            if c:
                clean.append(((tuple(exps), int(rexp)), Fraction(c)))
        return cls(num_halfedges, tuple(clean))

    @classmethod
    def constant(cls, num_halfedges: int, c=1) -> "WeightIntegrand":
        return cls.from_dict(num_halfedges, {((0,) * num_halfedges, 0): c})

    @classmethod
    def edge_products(cls, num_edges: int, powers: Sequence[int], c=1) -> "WeightIntegrand":
        """c * prod_e (w_{2e} w_{2e+1})^{powers[e]}."""
        exps = tuple(p for p in powers for _ in range(2))
        return cls.from_dict(2 * num_edges, {(exps, 0): c})

    @property
    def w_degree(self) -> int:
        return max((sum(e) for (e, _), _ in self.terms), default=0)

    @property
    def r_degree(self) -> int:
        return max((k for (_, k), _ in self.terms), default=0)

    def __call__(self, values: Sequence[int], r: int) -> Fraction:
        total = Fraction(0)
        for (exps, rexp), c in self.terms:
            term = c * Fraction(r) ** rexp
            for x, k in zip(values, exps):
                if k:
                    term *= x**k
            total += term
        return total


# --- constraint data ---------------------------------------------------------


def vertex_targets(graph: StableGraph, target: TargetModel) -> list[int]:
    return [pair_c1S(target, c) for c in graph.classes]


def check_compatible(graph: StableGraph, A: Sequence[int], target: TargetModel) -> None:
    if len(A) != graph.n:
        raise IncompatibleDataError("incompatible ramification data: one entry of A per leg required")
    if sum(A) != sum(vertex_targets(graph, target)):
        raise IncompatibleDataError("incompatible ramification data: sum of A differs from the pairing")


def _leg_load(graph: StableGraph, leg_values: Sequence[int]) -> list[int]:
    load = [0] * graph.num_vertices
    for i, v in enumerate(graph.legs):
        load[v] += leg_values[i]
    return load


# --- the two enumeration algorithms ---------------------------------------------


def iter_weightings_brute(
    graph: StableGraph, leg_values: Sequence[int], targets: Sequence[int], r: int
) -> Iterator[tuple[int, ...]]:
    """Scan every edge assignment and keep those meeting the vertex congruences."""
    load = _leg_load(graph, leg_values)
    ne = graph.num_edges
    incident = [[2 * e + side for e, side in graph.halfedges_at(v)] for v in range(graph.num_vertices)]
    for sides in itertools.product(range(r), repeat=ne):
        hv = []
        for x in sides:
            hv.extend((x, (-x) % r))
        ok = True
        for v, slots in enumerate(incident):
            s = load[v]
            for h in slots:
                s += hv[h]
            if (s - targets[v]) % r:
                ok = False
                break
        if ok:
            yield tuple(hv)


def _spanning_tree(graph: StableGraph):
    """BFS order, parent edge per vertex (None for the root), and the complementary edges."""
    nv = graph.num_vertices
    parent = [None] * nv
    seen = [False] * nv
    seen[0] = True
    order = [0]
    tree = set()
    i = 0
    while i < len(order):
        v = order[i]
        i += 1
        for e, side in graph.halfedges_at(v):
            u = graph.edges[e][1 - side]
            if not seen[u]:
                seen[u] = True
                parent[u] = (e, 1 - side)  # the half-edge of e sitting at u
                tree.add(e)
                order.append(u)
    free = [e for e in range(graph.num_edges) if e not in tree]
    return order, parent, free


def iter_weightings_tree(
    graph: StableGraph, leg_values: Sequence[int], targets: Sequence[int], r: int
) -> Iterator[tuple[int, ...]]:
    """Free values on the edges off a spanning tree; tree edges solved leaf to root."""
    order, parent, free = _spanning_tree(graph)
    load = _leg_load(graph, leg_values)
    ne = graph.num_edges
    incident = [graph.halfedges_at(v) for v in range(graph.num_vertices)]
    for sides in itertools.product(range(r), repeat=len(free)):
        hv = [None] * (2 * ne)
        for e, x in zip(free, sides):
            hv[2 * e] = x
            hv[2 * e + 1] = (-x) % r
        for v in reversed(order[1:]):
            e, side = parent[v]
            s = load[v]
            for f, t in incident[v]:
                if (f, t) != (e, side):
                    s += hv[2 * f + t]
            x = (targets[v] - s) % r
            hv[2 * e + side] = x
            hv[2 * e + 1 - side] = (-x) % r
        yield tuple(hv)


# --- public API -----------------------------------------------------------------


def _setup(graph, A, target, r):
    if r < 1:
        raise ValueError("modulus must be positive")
    check_compatible(graph, A, target)
    return [a % r for a in A], vertex_targets(graph, target)


def enumerate_weightings(graph: StableGraph, A: Sequence[int], target: TargetModel, r: int) -> list[Weighting]:
    legs, targets = _setup(graph, A, target, r)
    return [Weighting(r, tuple(legs), hv) for hv in iter_weightings_tree(graph, legs, targets, r)]


def sum_over_weightings_enum(graph, A, target, F: WeightIntegrand, r: int) -> Fraction:
    legs, targets = _setup(graph, A, target, r)
    return sum((F(hv, r) for hv in iter_weightings_brute(graph, legs, targets, r)), Fraction(0))


def sum_over_weightings_tree(graph, A, target, F: WeightIntegrand, r: int) -> Fraction:
    legs, targets = _setup(graph, A, target, r)
    return sum((F(hv, r) for hv in iter_weightings_tree(graph, legs, targets, r)), Fraction(0))


def sample_nodes(r_min: int, degree_bound: int) -> list[int]:
    """degree_bound + 1 fitting nodes followed by two held-out nodes."""
    return list(range(r_min, r_min + degree_bound + 3))


def weighting_polynomial(graph, A, target, F: WeightIntegrand, r_min: int, degree_bound: int) -> RPolynomial:
    """The r-polynomial through direct sums at consecutive nodes, checked at two held-out nodes."""
    samples = [(r, sum_over_weightings_tree(graph, A, target, F, r)) for r in sample_nodes(r_min, degree_bound)]
    return interpolate_polynomial(samples, degree_bound)


def default_r_min(A: Sequence[int], target: TargetModel, beta: CurveClass) -> int:
    a_plus = sum(a for a in A if a > 0)
    b = summand_bound_b(target, tuple(beta))
    return max(sum(abs(a) for a in A), 2 * (a_plus + b)) + 1


# --- batched moment sums used by the engine ------------------------------------


def edge_moment_sums(
    weightings: Sequence[tuple[int, ...]], num_edges: int, powers: Sequence[tuple[int, ...]]
) -> list[Fraction]:
    """For each power vector m, the sum over weightings of prod_e (w_h w_h')^{m_e}."""
    totals = [0] * len(powers)
    for hv in weightings:
        prods = [hv[2 * e] * hv[2 * e + 1] for e in range(num_edges)]
        for k, m in enumerate(powers):
            term = 1
            for p, x in zip(prods, m):
                term *= p**x
            totals[k] += term
    return [Fraction(t) for t in totals]


def moment_polynomials(
    graph: StableGraph,
    leg_values: Sequence[int],
    targets: Sequence[int],
    powers: Sequence[tuple[int, ...]],
    r_min: int,
    degree_bound: int,
    diagnostics: list | None = None,
) -> list[RPolynomial]:
    """Raw r-polynomials of the edge moments; leg values and targets are taken mod r."""
    nodes = sample_nodes(r_min, degree_bound)
    per_node = []
    for r in nodes:
        ws = list(iter_weightings_tree(graph, [a % r for a in leg_values], targets, r))
        per_node.append(edge_moment_sums(ws, graph.num_edges, powers))
    out = []
    for k, m in enumerate(powers):
        samples = [(r, vals[k]) for r, vals in zip(nodes, per_node)]
        try:
            poly = interpolate_polynomial(samples, degree_bound)
        except PolynomialityError as exc:
            raise PolynomialityError(str(exc), graph=graph) from None
        if diagnostics is not None:
            diagnostics.append({"graph": graph, "powers": m, "polynomial": poly, "nodes": nodes, "held_out": nodes[-2:]})
        out.append(poly)
    return out


def moment_polynomials_with_retry(graph, leg_values, targets, powers, r_min, degree_bound, diagnostics=None, attempts=4):
    """Raise r_min by doubling when held-out nodes disagree; each retry is logged."""
    r = r_min
    for attempt in range(attempts):
        try:
            return moment_polynomials(graph, leg_values, targets, powers, r, degree_bound, diagnostics)
        except PolynomialityError as exc:
            if attempt == attempts - 1:
                raise
            log.warning("polynomiality check failed at r_min=%d (%s); retrying with r_min=%d", r, exc, 2 * r)
            r *= 2
    raise AssertionError("unreachable")
