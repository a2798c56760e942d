"""Graph-sum classes: fixed-r values, their r = 0 constant terms, and the DR cycle.

For a graph with edge set E and working degree d, every decorated monomial of
codimension d arises from a choice of

* a leg monomial psi_i^p xi_i^q from exp(a_i^2 psi_i / 2 + a_i xi_i),
* a power eta(v)^m from exp(-eta(v)/2), where eta = eta_{0,2},
* per edge, psi_h^i psi_h'^j from the edge series, which carries (w_h w_h')^{i+j+1}.

The weighting dependence of a slot is therefore a product of edge moments, so
one lattice sum per distinct moment vector suffices.
"""

from __future__ import annotations

import itertools
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, factorial
from typing import Sequence

from .exact import PolynomialityError
from .graphs import StableGraph, automorphism_count, canonical_graph, canonicalize, enumerate_stable_graphs
from .strata import Ambient, Decoration, TautClass, normalize
from .target import CurveClass, TargetModel, pair_c1S
from .weightings import (
    IncompatibleDataError,
    Weighting,
    default_r_min,
    edge_moment_sums,
    iter_weightings_tree,
    moment_polynomials_with_retry,
    vertex_targets,
)

log = logging.getLogger(__name__)

ETA = (0, 2)


@dataclass(frozen=True)
class DRRequest:
    g: int
    A: tuple[int, ...]
    beta: CurveClass
    target: TargetModel
    degree: int

    def __post_init__(self):
        object.__setattr__(self, "A", tuple(int(a) for a in self.A))
        object.__setattr__(self, "beta", tuple(int(b) for b in self.beta))
        if self.g < 0 or self.degree < 0:
            raise ValueError("genus and degree must be non-negative")
        if not self.target.is_effective(self.beta):
            raise ValueError(f"class {self.beta} is not effective")
        if sum(self.A) != pair_c1S(self.target, self.beta):
            raise IncompatibleDataError("sum of A must equal pairing")

    @property
    def n(self) -> int:
        return len(self.A)

    @property
    def ambient(self) -> Ambient:
        return Ambient("X", self.g, self.n, self.beta, self.target)


# --- slot expansion ---------------------------------------------------------------


def edge_coefficient(i: int, j: int) -> Fraction:
    """Coefficient of P^{i+j+1} psi_h^i psi_h'^j in (1 - exp(-P s / 2)) / s, s = psi_h + psi_h'."""
    m = i + j + 1
    return Fraction((-1) ** (m - 1) * comb(i + j, i), 2**m * factorial(m))


def _leg_options(a: int, budget: int, with_xi: bool):
    out = []
    for p in range(budget + 1):
        for q in range(budget + 1 - p if with_xi else 1):
            c = Fraction(a * a, 2) ** p / factorial(p) * Fraction(a) ** q / factorial(q)
            if c:
                out.append((p + q, (p, q), c))
    return out


def graph_slots(graph: StableGraph, A: Sequence[int] | None, d: int, with_xi_eta: bool):
    """All (decoration, constant, edge power vector) of codimension d on this graph.

    ``A=None`` omits the leg factor (the Chiodo-type kernel).
    """
    budget = d - graph.num_edges
    if budget < 0:
        return []
    factors = []
    for i in range(graph.n):
        if A is None:
            factors.append([(0, ("leg", i, (0, 0)), Fraction(1))])
        else:
            factors.append([(deg, ("leg", i, pq), c) for deg, pq, c in _leg_options(A[i], budget, with_xi_eta)])
    for v in range(graph.num_vertices):
        top = budget if with_xi_eta else 0
        factors.append([(m, ("vertex", v, m), Fraction((-1) ** m, 2**m * factorial(m))) for m in range(top + 1)])
    for e in range(graph.num_edges):
        opts = []
        for t in range(budget + 1):
            for i in range(t + 1):
                opts.append((t, ("edge", e, (i, t - i)), edge_coefficient(i, t - i)))
        factors.append(opts)

    out = []

    def rec(k, remaining, chosen, coeff):
        if k == len(factors):
            if remaining == 0:
                out.append((_assemble(graph, chosen), coeff, _powers(graph, chosen)))
            return
        for deg, tag, c in factors[k]:
            if deg <= remaining:
                rec(k + 1, remaining - deg, chosen + [tag], coeff * c)

    rec(0, budget, [], Fraction(1))
    return out


def _assemble(graph: StableGraph, tags) -> Decoration:
    legs = [(0, 0)] * graph.n
    verts = [()] * graph.num_vertices
    halfedges = [(0, 0)] * graph.num_edges
    for kind, idx, val in tags:
        if kind == "leg":
            legs[idx] = val
        elif kind == "vertex":
            verts[idx] = ((ETA, val),) if val else ()
        else:
            halfedges[idx] = val
    return Decoration(tuple(legs), tuple(halfedges), (0,) * graph.num_edges, tuple(verts))


def _powers(graph: StableGraph, tags) -> tuple[int, ...]:
    m = [0] * graph.num_edges
    for kind, idx, val in tags:
        if kind == "edge":
            m[idx] = val[0] + val[1] + 1
    return tuple(m)


def _uses_xi_eta(target: TargetModel, space: str = "X") -> bool:
    return not (space == "X" and target.kind == "point")


# --- fixed r --------------------------------------------------------------------


def graph_contribution_fixed_r(
    graph: StableGraph, w: Weighting, A: Sequence[int], d: int, target: TargetModel
) -> TautClass:
    """Decorated class of one graph at one weighting, without the r^{-h1}/|Aut| prefactor."""
    amb = Ambient("X", graph.genus, graph.n, graph.total_class() if target.rank else (), target)
    prods = [w.edge_product(e) for e in range(graph.num_edges)]
    raw = []
    for decor, c, powers in graph_slots(graph, A, d, _uses_xi_eta(target)):
        val = c
        for p, m in zip(prods, powers):
            val *= p**m
        raw.append((graph, decor, val))
    return normalize(amb, raw)


def _fixed_r_task(args):
    graph, A, targets, d, r, with_xi_eta = args
    slots = graph_slots(graph, A, d, with_xi_eta)
    if not slots:
        return []
    powers = sorted({p for _, _, p in slots})
    ws = list(iter_weightings_tree(graph, [a % r for a in (A or [0] * graph.n)], targets, r))
    sums = dict(zip(powers, edge_moment_sums(ws, graph.num_edges, powers)))
    pref = Fraction(1, r**graph.h1 * automorphism_count(graph))
    return [(graph, decor, c * sums[p] * pref) for decor, c, p in slots]


def compute_P_fixed_r(req: DRRequest, r: int, jobs: int = 1) -> TautClass:
    if r < 2:
        raise ValueError("r must be at least 2")
    graphs = enumerate_stable_graphs(req.g, req.n, req.beta, req.target, req.degree)
    flag = _uses_xi_eta(req.target)
    tasks = [(G, req.A, vertex_targets(G, req.target), req.degree, r, flag) for G in graphs]
    raw = [t for chunk in _map(_fixed_r_task, tasks, jobs) for t in chunk]
    return normalize(req.ambient, raw)


# --- constant terms ------------------------------------------------------------------


def _constant_task(args):
    graph, A, legs, targets, d, r_min, with_xi_eta, want_diag = args
    slots = graph_slots(graph, A, d, with_xi_eta)
    if not slots:
        return [], []
    powers = sorted({p for _, _, p in slots})
    h1 = graph.h1
    bound = 2 * d + h1
    diag = [] if want_diag else None
    polys = moment_polynomials_with_retry(graph, legs, targets, powers, r_min, bound, diag)
    values = {}
    for p, poly in zip(powers, polys):
        try:
            values[p] = poly.shift_down(h1).constant_term
        except PolynomialityError as exc:
            raise PolynomialityError(str(exc), graph=graph) from None
    aut = automorphism_count(graph)
    return [(graph, decor, c * values[p] / aut) for decor, c, p in slots], diag or []


def _map(fn, tasks, jobs):
    if jobs <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, tasks, chunksize=1))


def compute_P_constant(
    req: DRRequest, r_min: int | None = None, jobs: int = 1, diagnostics: list | None = None
) -> TautClass:
    """Constant term in r of the degree-d graph sum, with held-out polynomiality checks."""
    r_min = r_min if r_min is not None else default_r_min(req.A, req.target, req.beta)
    graphs = enumerate_stable_graphs(req.g, req.n, req.beta, req.target, req.degree)
    flag = _uses_xi_eta(req.target)
    tasks = [
        (G, req.A, list(req.A), vertex_targets(G, req.target), req.degree, r_min, flag, diagnostics is not None)
        for G in graphs
    ]
    raw = []
    for terms, diag in _map(_constant_task, tasks, jobs):
        raw.extend(terms)
        if diagnostics is not None:
            diagnostics.extend(diag)
    return normalize(req.ambient, raw)


def compute_DR(g: int, A, beta: CurveClass, target: TargetModel, r_min: int | None = None, jobs: int = 1) -> TautClass:
    return compute_P_constant(DRRequest(g, tuple(A), tuple(beta), target, g), r_min=r_min, jobs=jobs)


# --- constant-term class on the Picard-type stack ------------------------------------


def z_graphs(g: int, A, beta: CurveClass, target: TargetModel, k: int) -> list[StableGraph]:
    """Prestable graphs with vertex degrees that arise from X-valued stable graphs."""
    from .strata import z_graph

    seen = {}
    for G in enumerate_stable_graphs(g, len(A), beta, target, k):
        Z = z_graph(G, A, target)
        seen.setdefault(canonicalize(Z).key, canonical_graph(Z))
    return [seen[key] for key in sorted(seen)]


def chiodo_constant_class(
    g: int, A, beta: CurveClass, target: TargetModel, k: int, r_min: int | None = None, jobs: int = 1
) -> TautClass:
    """r = 0 value of the twisted graph sum over Picard-type graphs, degree k, no leg factor.

    A and beta only select the vertex degrees d(v) that occur; twists vanish on
    legs and sum to d(v) mod r at each vertex.
    """
    A = tuple(A)
    r_min = r_min if r_min is not None else default_r_min(A, target, beta)
    amb = Ambient("Z", g, len(A), (0,), target)
    tasks = [
        (Z, None, [0] * len(A), [c[0] for c in Z.classes], k, r_min, True, False)
        for Z in z_graphs(g, A, beta, target, k)
    ]
    raw = [t for terms, _ in _map(_constant_task, tasks, jobs) for t in terms]
    return normalize(amb, raw)


# --- GRR exponentiation check ------------------------------------------------------


@dataclass
class GRRReport:
    k_max: int
    truncation: int
    passed: bool
    failures: list[str] = field(default_factory=list)


def _bmul(x: dict, y: dict, trunc: int) -> dict:
    """Multiply polynomials keyed by (deg psi_h, deg psi_h', power of 1/r, power of tw)."""
    out: dict = {}
    for (i1, j1, r1, a1), c1 in x.items():
        for (i2, j2, r2, a2), c2 in y.items():
            if i1 + i2 + j1 + j2 > trunc:
                continue
            key = (i1 + i2, j1 + j2, r1 + r2, a1 + a2)
            out[key] = out.get(key, 0) + c1 * c2
    return {k: v for k, v in out.items() if v}


def _alternating(k: int) -> dict:
    """sum_{i+j=k-1} (-1)^i psi_h^i psi_h'^j."""
    return {(i, k - 1 - i, 0, 0): Fraction((-1) ** i) for i in range(k)}


def verify_grr_exponentiation(k_max: int, truncation: int, flip_sign: bool = False) -> GRRReport:
    """Check that exponentiating the leading edge terms of -ch_k rebuilds the edge factor.

    Polynomials in psi_h, psi_h' (truncated at ``truncation``), 1/r and a twist
    tw = tw(h).  The leading single-edge term of ch_k is
    r^{-k} tw^{k+1}/(k+1)! sum_{i+j=k-1} (-1)^i psi_h^i psi_h'^j; its total
    Chern class uses log c = sum (-1)^{k-1} (k-1)! ch_k, and n-fold
    self-intersections of the edge carry (n-1) excess factors -(psi_h + psi_h')/r.
    In the lowest power of 1/r of each psi-degree, tw(h) tw(h') becomes -tw^2.
    """
    failures = []
    # identity: (sum (-1)^i x^i y^j) (x + y) = y^k - (-x)^k
    for k in range(1, k_max + 1):
        lhs = _bmul(_alternating(k), {(1, 0, 0, 0): Fraction(1), (0, 1, 0, 0): Fraction(1)}, k)
        rhs = {(0, k, 0, 0): Fraction(1)}
        key = (k, 0, 0, 0)
        rhs[key] = rhs.get(key, 0) - Fraction((-1) ** k)
        rhs = {a: b for a, b in rhs.items() if b}
        if lhs != rhs:
            failures.append(f"alternating-sum identity fails at k={k}")
    sign = 1 if flip_sign else -1
    K = min(k_max, truncation + 1)
    F: dict = {}
    for k in range(1, K + 1):
        c = Fraction(sign * (-1) ** (k - 1) * factorial(k - 1), factorial(k + 1))
        for (i, j, _, _), s in _alternating(k).items():
            if i + j <= truncation:
                F[(i, j, k, k + 1)] = F.get((i, j, k, k + 1), 0) + c * s
    u = {(1, 0, 1, 0): Fraction(-1), (0, 1, 1, 0): Fraction(-1)}
    total: dict = {}
    power = dict(F)  # F^n u^(n-1)
    n = 1
    while power:
        for key, c in power.items():
            total[key] = total.get(key, 0) + c / factorial(n)
        power = _bmul(_bmul(power, F, truncation), u, truncation)
        n += 1
    for delta in range(0, min(k_max - 1, truncation) + 1):
        part = {key: c for key, c in total.items() if key[0] + key[1] == delta and c}
        lowest = 2 * delta + 1
        if any(key[2] > lowest for key in part):
            failures.append(f"degree {delta}: terms below r^-{lowest}")
            continue
        got = {(key[0], key[1], key[3]): c for key, c in part.items() if key[2] == lowest}
        # degree-delta part of (1 - exp(-P s/2))/s with P -> -tw^2
        coef = Fraction((-1) ** delta, factorial(delta + 1)) * Fraction(-1, 2) ** (delta + 1)
        want = {(i, delta - i, 2 * delta + 2): coef * comb(delta, i) for i in range(delta + 1)}
        if got != want:
            failures.append(f"degree {delta}: exponentiated edge terms do not match the edge factor")
    return GRRReport(k_max, truncation, not failures, failures)
