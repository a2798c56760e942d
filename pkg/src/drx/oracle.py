"""Slow reference path for the graph-sum constant term.

Nothing here reuses the main engine: graphs are generated as labelled
multigraphs and deduplicated by brute-force isomorphism tests, automorphisms
are counted by permuting half-edges, weightings are found by scanning every
half-edge assignment, the integrand is expanded as a generic truncated power
series, and the value at r = 0 comes from Lagrange's formula.
Only the final canonicalization into a :class:`TautClass` is shared.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from math import factorial

from .graphs import StableGraph
from .strata import Ambient, Decoration, TautClass, normalize
from .target import TargetModel, effective_splittings, pair_c1S

# --- labelled graph generation --------------------------------------------------


def _halfedge_vertices(edges):
    return [v for e in edges for v in e]


def _same_graph(x: StableGraph, y: StableGraph) -> bool:
    if (x.num_vertices, x.num_edges) != (y.num_vertices, y.num_edges):
        return False
    target = sorted(tuple(sorted(e)) for e in y.edges)
    for perm in itertools.permutations(range(x.num_vertices)):
        if any(x.genera[v] != y.genera[perm[v]] or x.classes[v] != y.classes[perm[v]] for v in range(x.num_vertices)):
            continue
        if any(perm[x.legs[i]] != y.legs[i] for i in range(x.n)):
            continue
        if sorted(tuple(sorted((perm[a], perm[b]))) for a, b in x.edges) == target:
            return True
    return False


def brute_force_automorphisms(graph: StableGraph) -> int:
    """Count pairs (vertex permutation, half-edge permutation) preserving all structure."""
    hv = _halfedge_vertices(graph.edges)
    nh = len(hv)
    count = 0
    for perm in itertools.permutations(range(graph.num_vertices)):
        if any(graph.genera[v] != graph.genera[perm[v]] or graph.classes[v] != graph.classes[perm[v]]
               for v in range(graph.num_vertices)):
            continue
        if any(perm[graph.legs[i]] != graph.legs[i] for i in range(graph.n)):
            continue
        for hperm in itertools.permutations(range(nh)):
            if any(hv[hperm[h]] != perm[hv[h]] for h in range(nh)):
                continue
            # partner of h is h ^ 1
            if all(hperm[h ^ 1] == hperm[h] ^ 1 for h in range(nh)):
                count += 1
    return count


def naive_stable_graphs(g: int, n: int, beta, target: TargetModel, max_edges: int) -> list[StableGraph]:
    reps: list[StableGraph] = []
    for ne in range(max_edges + 1):
        for nv in range(1, ne + 2):
            if ne - nv + 1 > g or ne - nv + 1 < 0:
                continue
            pairs = [(a, b) for a in range(nv) for b in range(a, nv)]
            for edges in itertools.combinations_with_replacement(pairs, ne):
                for genera in itertools.product(range(g + 1), repeat=nv):
                    if sum(genera) + ne - nv + 1 != g:
                        continue
                    for legs in itertools.product(range(nv), repeat=n):
                        for classes in effective_splittings(target, tuple(beta), nv):
                            G = StableGraph(genera, classes, legs, edges)
                            if not G.is_connected():
                                continue
                            if any(
                                not any(classes[v]) and 2 * genera[v] - 2 + G.valence(v) <= 0
                                for v in range(nv)
                            ):
                                continue
                            if not any(_same_graph(G, R) for R in reps):
                                reps.append(G)
    return reps


def naive_weightings(graph: StableGraph, A, target: TargetModel, r: int):
    nh = 2 * graph.num_edges
    hv = _halfedge_vertices(graph.edges)
    for values in itertools.product(range(r), repeat=nh):
        if any((values[2 * e] + values[2 * e + 1]) % r for e in range(graph.num_edges)):
            continue
        ok = True
        for v in range(graph.num_vertices):
            s = sum(A[i] for i in range(graph.n) if graph.legs[i] == v)
            s += sum(values[h] for h in range(nh) if hv[h] == v)
            if (s - pair_c1S(target, graph.classes[v])) % r:
                ok = False
                break
        if ok:
            yield values


# --- truncated multivariate series -------------------------------------------------


class _Series:
    """Polynomial in named variables with weights, truncated above a total weight."""

    def __init__(self, nvars, weights, cap, terms=None):
        self.nvars, self.weights, self.cap = nvars, weights, cap
        self.terms = terms or {}

    def weight(self, mono):
        return sum(w * e for w, e in zip(self.weights, mono))

    def const(self, c):
        return _Series(self.nvars, self.weights, self.cap, {(0,) * self.nvars: Fraction(c)})

    def var(self, k, c=1):
        mono = tuple(1 if i == k else 0 for i in range(self.nvars))
        return _Series(self.nvars, self.weights, self.cap, {mono: Fraction(c)})

    def __add__(self, o):
        t = dict(self.terms)
        for m, c in o.terms.items():
            t[m] = t.get(m, 0) + c
        return _Series(self.nvars, self.weights, self.cap, {m: c for m, c in t.items() if c})

    def __mul__(self, o):
        if not isinstance(o, _Series):
            return _Series(self.nvars, self.weights, self.cap, {m: c * o for m, c in self.terms.items() if c * o})
        t = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in o.terms.items():
                m = tuple(a + b for a, b in zip(m1, m2))
                if self.weight(m) <= self.cap:
                    t[m] = t.get(m, 0) + c1 * c2
        return _Series(self.nvars, self.weights, self.cap, {m: c for m, c in t.items() if c})

    def exp(self):
        out, term = self.const(1), self.const(1)
        for k in range(1, self.cap + 1):
            term = term * self * Fraction(1, k)
            out = out + term
        return out


def _naive_graph_class(graph: StableGraph, A, target: TargetModel, d: int, P: tuple[int, ...]):
    """Expand the integrand for fixed edge products P; returns {Decoration: value}."""
    n, ne, nv = graph.n, graph.num_edges, graph.num_vertices
    cap = d - ne
    if cap < 0:
        return {}
    # variables: psi_i, xi_i (legs), psi per half-edge, eta per vertex
    nvars = 2 * n + 2 * ne + nv
    S = _Series(nvars, [1] * nvars, cap)
    point = target.kind == "point"
    integrand = S.const(1)
    for i in range(n):
        f = S.var(2 * i, Fraction(A[i] ** 2, 2))
        if not point:
            f = f + S.var(2 * i + 1, A[i])
        integrand = integrand * f.exp()
    if not point:
        for v in range(nv):
            integrand = integrand * S.var(2 * n + 2 * ne + v, Fraction(-1, 2)).exp()
    for e in range(ne):
        s = S.var(2 * n + 2 * e) + S.var(2 * n + 2 * e + 1)
        factor, spow = S.const(0), S.const(1)
        for m in range(1, cap + 2):
            factor = factor + spow * (Fraction((-1) ** (m - 1), factorial(m)) * Fraction(P[e], 2) ** m)
            spow = spow * s
        integrand = integrand * factor
    out = {}
    for mono, c in integrand.terms.items():
        if sum(mono) != cap:
            continue
        legs = tuple((mono[2 * i], mono[2 * i + 1]) for i in range(n))
        halfedges = tuple((mono[2 * n + 2 * e], mono[2 * n + 2 * e + 1]) for e in range(ne))
        verts = tuple((((0, 2), mono[2 * n + 2 * ne + v]),) if mono[2 * n + 2 * ne + v] else () for v in range(nv))
        out[Decoration(legs, halfedges, (0,) * ne, verts)] = c
    return out


def _lagrange_at_zero(points):
    total = Fraction(0)
    for i, (xi, yi) in enumerate(points):
        term = Fraction(yi)
        for j, (xj, _) in enumerate(points):
            if i != j:
                term *= Fraction(-xj, xi - xj)
        total += term
    return total


def naive_P_constant(g: int, A, beta, target: TargetModel, d: int, r0: int, extra_nodes: int = 2) -> TautClass:
    """Full enumeration at r = r0, ..., r0 + 2d + extra_nodes and Lagrange interpolation at 0."""
    A = tuple(A)
    nodes = list(range(r0, r0 + 2 * d + extra_nodes + 1))
    amb = Ambient("X", g, len(A), tuple(beta), target)
    raw = []
    for G in naive_stable_graphs(g, len(A), beta, target, d):
        aut = brute_force_automorphisms(G)
        per_node = []
        for r in nodes:
            acc: dict = {}
            cache: dict = {}
            for values in naive_weightings(G, A, target, r):
                P = tuple(values[2 * e] * values[2 * e + 1] for e in range(G.num_edges))
                if P not in cache:
                    cache[P] = _naive_graph_class(G, A, target, d, P)
                for dec, c in cache[P].items():
                    acc[dec] = acc.get(dec, 0) + c
            per_node.append({k: Fraction(v, 1) / r ** G.h1 for k, v in acc.items()})
        keys = set().union(*per_node)
        for dec in keys:
            pts = [(r, vals.get(dec, 0)) for r, vals in zip(nodes, per_node)]
            raw.append((G, dec, _lagrange_at_zero(pts) / aut))
    return normalize(amb, raw)
