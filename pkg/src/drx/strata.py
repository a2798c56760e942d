"""Tautological classes as exact linear combinations of decorated graphs.

Decorations are monomials: ``psi^a xi^b`` per leg, ``psi^a`` per edge side,
``xi^a`` per edge and a monomial in ``eta_{a,b}`` (a + b >= 2) per vertex.
Kappa classes are written as ``eta_{a,0}``.  Classes live either on the space
of maps to X (space ``"X"``, vertex labels are curve classes) or on the
Picard-type stack (space ``"Z"``, vertex labels are 1-tuples ``(d,)``).
"""

from __future__ import annotations

import itertools
import json
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial
from typing import Iterable, Mapping

from .exact import format_rational, parse_rational
from .graphs import (
    StableGraph,
    automorphism_count,
    canonical_labelling,
    canonicalize,
    contract,
    enumerate_stable_graphs,
    graph_from_dict,
    graph_to_dict,
    is_stable_vertex,
    isomorphisms,
)
from .target import CurveClass, TargetModel, effective_summands, pair_c1S

EtaMonomial = tuple[tuple[tuple[int, int], int], ...]


def eta_monomial(factors: Mapping[tuple[int, int], int] | Iterable) -> EtaMonomial:
    """Normalize {(a, b): exponent} (or an iterable of index pairs) to a sorted tuple."""
    if isinstance(factors, Mapping):
        items = factors.items()
    else:
        items = Counter(tuple(f) for f in factors).items()
    out = []
    for (a, b), e in items:
        if a < 0 or b < 0 or a + b < 2:
            raise ValueError(f"eta_{{{a},{b}}} is not an allowed variable")
        if e < 0:
            raise ValueError("negative exponent")
        if e:
            out.append(((int(a), int(b)), int(e)))
    return tuple(sorted(out))


def eta_degree(mono: EtaMonomial) -> int:
    return sum((a + b - 1) * e for (a, b), e in mono)


def eta_mul(x: EtaMonomial, y: EtaMonomial) -> EtaMonomial:
    c = Counter(dict(x))
    c.update(dict(y))
    return eta_monomial(c)


def eta_factors(mono: EtaMonomial) -> list[tuple[int, int]]:
    return [ab for ab, e in mono for _ in range(e)]


@dataclass(frozen=True)
class Decoration:
    legs: tuple[tuple[int, int], ...]
    halfedges: tuple[tuple[int, int], ...]
    edges: tuple[int, ...]
    vertices: tuple[EtaMonomial, ...]

    def __post_init__(self):
        for x in itertools.chain(
            (p for pair in self.legs for p in pair),
            (p for pair in self.halfedges for p in pair),
            self.edges,
        ):
            if x < 0:
                raise ValueError("decoration exponents must be non-negative")

    @classmethod
    def trivial(cls, graph: StableGraph) -> "Decoration":
        return cls(
            ((0, 0),) * graph.n,
            ((0, 0),) * graph.num_edges,
            (0,) * graph.num_edges,
            ((),) * graph.num_vertices,
        )

    @property
    def degree(self) -> int:
        return (
            sum(p + x for p, x in self.legs)
            + sum(p + q for p, q in self.halfedges)
            + sum(self.edges)
            + sum(eta_degree(m) for m in self.vertices)
        )

    def has_xi_or_eta_b(self) -> bool:
        """True when some factor carries xi (leg, edge, or eta_{a,b} with b > 0)."""
        return (
            any(x for _, x in self.legs)
            or any(self.edges)
            or any(b > 0 for m in self.vertices for (a, b), _ in m)
        )

    def __mul__(self, other: "Decoration") -> "Decoration":
        return Decoration(
            tuple((a + c, b + d) for (a, b), (c, d) in zip(self.legs, other.legs)),
            tuple((a + c, b + d) for (a, b), (c, d) in zip(self.halfedges, other.halfedges)),
            tuple(a + b for a, b in zip(self.edges, other.edges)),
            tuple(eta_mul(x, y) for x, y in zip(self.vertices, other.vertices)),
        )


@dataclass(frozen=True)
class DecoratedGraph:
    graph: StableGraph
    decor: Decoration

    @property
    def codim(self) -> int:
        return self.graph.num_edges + self.decor.degree

    def sort_key(self):
        g, d = self.graph, self.decor
        return (self.codim, g.num_edges, g.num_vertices, g.genera, g.classes, g.legs, g.edges,
                d.legs, d.halfedges, d.edges, d.vertices)


def _edge_labels(decor: Decoration):
    return [(p, q, x) for (p, q), x in zip(decor.halfedges, decor.edges)]


@lru_cache(maxsize=500_000)
def canonical_decorated(graph: StableGraph, decor: Decoration) -> DecoratedGraph:
    """Relabel vertices and edges (flipping sides as needed) to the canonical representative."""
    enc, _, _, _ = canonical_labelling(graph, decor.vertices, _edge_labels(decor))
    verts, legs, rows = enc
    g = StableGraph(
        tuple(v[0] for v in verts),
        tuple(v[1] for v in verts),
        legs,
        tuple((row[0], row[1]) for row in rows),
    )
    d = Decoration(
        decor.legs,
        tuple((row[2], row[3]) for row in rows),
        tuple(row[4] for row in rows),
        tuple(v[2] for v in verts),
    )
    return DecoratedGraph(g, d)


def decorated_automorphisms(dg: DecoratedGraph) -> int:
    """Order of the automorphism group of a decorated graph (used by tests)."""
    g, d = dg.graph, dg.decor
    enc, _, rows, count = canonical_labelling(g, d.vertices, _edge_labels(d))
    aut = count
    for row, m in Counter(r[0] for r in rows).items():
        aut *= factorial(m)
        if row[0] == row[1] and row[2] == row[3]:
            aut *= 2**m
    return aut


# --- ambient data and classes -----------------------------------------------------


@dataclass(frozen=True)
class Ambient:
    space: str  # "X" or "Z"
    g: int
    n: int
    beta: CurveClass
    target: TargetModel

    def __post_init__(self):
        if self.space not in ("X", "Z"):
            raise ValueError("space must be 'X' or 'Z'")
        object.__setattr__(self, "beta", tuple(self.beta))

    def drops_xi_eta(self) -> bool:
        return self.space == "X" and self.target.kind == "point"

    def to_dict(self) -> dict:
        return {"space": self.space, "g": self.g, "n": self.n, "beta": list(self.beta), "target": self.target.to_dict()}

    @classmethod
    def from_dict(cls, data: dict) -> "Ambient":
        return cls(data["space"], data["g"], data["n"], tuple(data["beta"]), TargetModel.from_dict(data["target"]))


class AmbientMismatch(ValueError):
    pass


@dataclass(frozen=True)
class TautClass:
    ambient: Ambient
    terms: tuple[tuple[DecoratedGraph, Fraction], ...] = field(default=())

    # construction

    @classmethod
    def zero(cls, ambient: Ambient) -> "TautClass":
        return cls(ambient, ())

    @classmethod
    def fundamental(cls, ambient: Ambient) -> "TautClass":
        graph = StableGraph.smooth(ambient.g, ambient.n, ambient.beta)
        return normalize(ambient, [(graph, Decoration.trivial(graph), 1)])

    # access

    def as_dict(self) -> dict[DecoratedGraph, Fraction]:
        return dict(self.terms)

    def coefficient(self, graph: StableGraph, decor: Decoration | None = None) -> Fraction:
        decor = decor or Decoration.trivial(graph)
        return self.as_dict().get(canonical_decorated(graph, decor), Fraction(0))

    def is_zero(self) -> bool:
        return not self.terms

    def __len__(self) -> int:
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms)

    # linear algebra

    def __add__(self, other: "TautClass") -> "TautClass":
        return add(self, other)

    def __neg__(self) -> "TautClass":
        return scale(self, -1)

    def __sub__(self, other: "TautClass") -> "TautClass":
        return add(self, scale(other, -1))

    def __mul__(self, c) -> "TautClass":
        return scale(self, c)

    __rmul__ = __mul__


def normalize(ambient: Ambient, raw: Iterable) -> TautClass:
    """Canonicalize (graph, decoration, coefficient) triples and merge them."""
    acc: dict[DecoratedGraph, Fraction] = defaultdict(Fraction)
    drop = ambient.drops_xi_eta()
    for graph, decor, coeff in raw:
        if graph.n != ambient.n:
            raise AmbientMismatch("term has the wrong number of legs")
        if not coeff or (drop and decor.has_xi_or_eta_b()):
            continue
        acc[canonical_decorated(graph, decor)] += Fraction(coeff)
    items = [(k, v) for k, v in acc.items() if v]
    items.sort(key=lambda kv: kv[0].sort_key())
    return TautClass(ambient, tuple(items))


def _check(a: TautClass, b: TautClass):
    if a.ambient != b.ambient:
        raise AmbientMismatch(f"ambient mismatch: {a.ambient} vs {b.ambient}")


def add(a: TautClass, b: TautClass) -> TautClass:
    _check(a, b)
    return normalize(a.ambient, ((k.graph, k.decor, c) for k, c in itertools.chain(a.terms, b.terms)))


def scale(a: TautClass, c) -> TautClass:
    c = Fraction(c)
    return normalize(a.ambient, ((k.graph, k.decor, v * c) for k, v in a.terms))


def degree_component(a: TautClass, d: int) -> TautClass:
    return TautClass(a.ambient, tuple((k, v) for k, v in a.terms if k.codim == d))


# --- pull-back from the Picard-type stack ------------------------------------------

Poly = dict  # Decoration -> Fraction


def _poly_mul(x: Poly, y: Poly) -> Poly:
    out: Poly = defaultdict(Fraction)
    for dx, cx in x.items():
        for dy, cy in y.items():
            out[dx * dy] += cx * cy
    return {k: v for k, v in out.items() if v}


def _blank(graph: StableGraph) -> Decoration:
    return Decoration.trivial(graph)


def _leg_mono(graph, i, psi, xi) -> Decoration:
    base = _blank(graph)
    legs = list(base.legs)
    legs[i] = (psi, xi)
    return Decoration(tuple(legs), base.halfedges, base.edges, base.vertices)


def _vertex_mono(graph, v, mono: EtaMonomial) -> Decoration:
    base = _blank(graph)
    verts = list(base.vertices)
    verts[v] = mono
    return Decoration(base.legs, base.halfedges, base.edges, tuple(verts))


def pullback_decoration(graph: StableGraph, decor: Decoration, A) -> Poly:
    """Apply the xi and eta_{0,b} substitution rules to one decoration."""
    base = Decoration(
        ((0, 0),) * graph.n,
        decor.halfedges,
        decor.edges,
        tuple(tuple(f for f in m if f[0][0] > 0) for m in decor.vertices),
    )
    poly: Poly = {base: Fraction(1)}
    for i, (p, q) in enumerate(decor.legs):
        a = A[i]
        # psi^p (xi + a psi)^q
        factor = {}
        for j in range(q + 1):
            c = comb(q, j) * a**j
            if c:
                factor[_leg_mono(graph, i, p + j, q - j)] = Fraction(c)
        poly = _poly_mul(poly, factor)
    for v, mono in enumerate(decor.vertices):
        legs_here = graph.markings_at(v)
        for (a0, b), e in mono:
            if a0 > 0:
                continue
            factor = {_vertex_mono(graph, v, (((0, b), 1),)): Fraction(1)}
            for i in legs_here:
                for k in range(1, b + 1):
                    c = comb(b, k) * A[i] ** k
                    if c:
                        key = _leg_mono(graph, i, k - 1, b - k)
                        factor[key] = factor.get(key, Fraction(0)) - c
            for _ in range(e):
                poly = _poly_mul(poly, factor)
    return poly


def pullback_piZ(cls: TautClass, A, target: TargetModel, beta: CurveClass) -> TautClass:
    """Pull a class on the Picard-type stack back to maps to X of class beta."""
    if cls.ambient.space != "Z":
        raise AmbientMismatch("pull-back expects a class on the Picard-type stack")
    A = tuple(A)
    beta = tuple(beta)
    if len(A) != cls.ambient.n:
        raise ValueError("one entry of A per marking required")
    out_amb = Ambient("X", cls.ambient.g, cls.ambient.n, beta, target)
    summands = effective_summands(target, beta)
    raw = []
    for dg, coeff in cls.terms:
        graph = dg.graph
        options = []
        for v in range(graph.num_vertices):
            (dv,) = graph.classes[v]
            load = sum(A[i] for i in graph.markings_at(v))
            options.append([s for s in summands if pair_c1S(target, s) - load == dv])
        decor_poly = pullback_decoration(graph, dg.decor, A)
        for classes in itertools.product(*options):
            if tuple(sum(x) for x in zip(*classes)) != beta:
                continue
            xg = StableGraph(graph.genera, classes, graph.legs, graph.edges)
            if not all(is_stable_vertex(xg.genera[v], xg.valence(v), classes[v]) for v in range(xg.num_vertices)):
                continue
            for decor, c in decor_poly.items():
                raw.append((xg, decor, coeff * c))
    return normalize(out_amb, raw)


def z_graph(graph: StableGraph, A, target: TargetModel) -> StableGraph:
    """Image of an X-valued graph on the Picard-type stack: vertex degree = pairing - leg load."""
    degs = []
    for v in range(graph.num_vertices):
        load = sum(A[i] for i in graph.markings_at(v))
        degs.append((pair_c1S(target, graph.classes[v]) - load,))
    return StableGraph(graph.genera, tuple(degs), graph.legs, graph.edges)


# --- product --------------------------------------------------------------------------


@lru_cache(maxsize=4096)
def _candidate_graphs(g, n, beta, target, max_edges):
    return tuple(enumerate_stable_graphs(g, n, beta, target, max_edges))


def _structures(gamma: StableGraph, ga: StableGraph, gb: StableGraph):
    """Generic (A, B)-structures on gamma: edge sets covering E with identifications."""
    ea, eb, ne = ga.num_edges, gb.num_edges, gamma.num_edges
    key_a, key_b = canonicalize(ga).key, canonicalize(gb).key
    out = []
    subsets_a = []
    for sa in itertools.combinations(range(ne), ea):
        ca, vma, ema = contract(gamma, sa)
        if canonicalize(ca).key != key_a:
            continue
        subsets_a.append((set(sa), ca, vma, ema))
    subsets_b = []
    for sb in itertools.combinations(range(ne), eb):
        cb, vmb, emb = contract(gamma, sb)
        if canonicalize(cb).key != key_b:
            continue
        subsets_b.append((set(sb), cb, vmb, emb))
    for sa, ca, vma, ema in subsets_a:
        for sb, cb, vmb, emb in subsets_b:
            if len(sa | sb) != ne:
                continue
            for isoa in isomorphisms(ca, ga):
                for isob in isomorphisms(cb, gb):
                    out.append(((sa, vma, ema, isoa), (sb, vmb, emb, isob)))
    return out


def _pull_side(gamma, data, decor: Decoration):
    """Per-edge psi/xi data and per-vertex eta preimages coming from one factor."""
    s, vmap, emap, (iso_v, iso_e) = data
    halfedges = {}
    xis = {}
    for e in s:
        e2, flip = iso_e[emap[e]]
        p = decor.halfedges[e2]
        halfedges[e] = (p[1], p[0]) if flip else p
        xis[e] = decor.edges[e2]
    preimages = defaultdict(list)
    for v in range(gamma.num_vertices):
        preimages[iso_v[vmap[v]]].append(v)
    return halfedges, xis, preimages


def _distribute(vertex_decor, preimages, nv):
    """All ways of sending each eta factor of each target vertex to one of its preimages."""
    slots = []
    for u, mono in enumerate(vertex_decor):
        for f in eta_factors(mono):
            slots.append((f, preimages[u]))
    for choice in itertools.product(*(vs for _, vs in slots)):
        verts = [Counter() for _ in range(nv)]
        for (f, _), v in zip(slots, choice):
            verts[v][f] += 1
        yield tuple(eta_monomial(c) for c in verts)


def product_terms(a: DecoratedGraph, b: DecoratedGraph, ambient: Ambient):
    """Yield (graph, decoration, coefficient, number_of_shared_edges) for one pair of terms."""
    ga, gb = a.graph, b.graph
    lo = max(ga.num_edges, gb.num_edges)
    hi = ga.num_edges + gb.num_edges
    for gamma in _candidate_graphs(ambient.g, ambient.n, ambient.beta, ambient.target, hi):
        if gamma.num_edges < lo:
            continue
        structs = _structures(gamma, ga, gb)
        if not structs:
            continue
        weight = Fraction(1, automorphism_count(gamma))
        for sa, sb in structs:
            hea, xia, prea = _pull_side(gamma, sa, a.decor)
            heb, xib, preb = _pull_side(gamma, sb, b.decor)
            legs = tuple((p + r, q + s) for (p, q), (r, s) in zip(a.decor.legs, b.decor.legs))
            shared = sorted(set(hea) & set(heb))
            halfedges, xis = [], []
            for e in range(gamma.num_edges):
                ha, hb = hea.get(e, (0, 0)), heb.get(e, (0, 0))
                halfedges.append((ha[0] + hb[0], ha[1] + hb[1]))
                xis.append(xia.get(e, 0) + xib.get(e, 0))
            for va in _distribute(a.decor.vertices, prea, gamma.num_vertices):
                for vb in _distribute(b.decor.vertices, preb, gamma.num_vertices):
                    verts = tuple(eta_mul(x, y) for x, y in zip(va, vb))
                    # excess factor -(psi_h + psi_h') on every shared edge
                    for sides in itertools.product((0, 1), repeat=len(shared)):
                        he = list(halfedges)
                        for e, s in zip(shared, sides):
                            p = list(he[e])
                            p[s] += 1
                            he[e] = tuple(p)
                        sign = -1 if len(shared) % 2 else 1
                        decor = Decoration(legs, tuple(he), tuple(xis), verts)
                        yield gamma, decor, weight * sign, len(shared)


def product(x: TautClass, y: TautClass, r=1, max_codim: int | None = None):
    """Product of two classes on the space of maps to X.

    With a numeric ``r`` every shared edge contributes a factor -(1/r)(psi + psi').
    With ``r="formal"`` the result is a dict mapping k to the class multiplying r^{-k}.
    Terms of codimension above ``max_codim`` are discarded when it is given.
    """
    _check(x, y)
    amb = x.ambient
    if amb.space != "X":
        raise NotImplementedError("products are implemented for classes on the space of maps to X")
    buckets: dict[int, list] = defaultdict(list)
    for ta, ca in x.terms:
        for tb, cb in y.terms:
            if max_codim is not None and ta.codim + tb.codim > max_codim:
                continue
            for gamma, decor, c, k in product_terms(ta, tb, amb):
                buckets[k].append((gamma, decor, c * ca * cb))
    if r == "formal":
        return {k: normalize(amb, raw) for k, raw in sorted(buckets.items())}
    r = Fraction(r)
    raw = [(g, d, c / r**k) for k, items in buckets.items() for g, d, c in items]
    return normalize(amb, raw)


# --- serialization ----------------------------------------------------------------


def decoration_to_dict(decor: Decoration) -> dict:
    return {
        "legs": [{"psi": p, "xi": x} for p, x in decor.legs],
        "halfedges": [list(p) for p in decor.halfedges],
        "edges": list(decor.edges),
        "vertices": [[[a, b, e] for (a, b), e in m] for m in decor.vertices],
    }


def decoration_from_dict(data: dict) -> Decoration:
    return Decoration(
        tuple((x["psi"], x["xi"]) for x in data["legs"]),
        tuple((p[0], p[1]) for p in data["halfedges"]),
        tuple(data["edges"]),
        tuple(eta_monomial({(a, b): e for a, b, e in m}) for m in data["vertices"]),
    )


def class_to_dict(cls: TautClass) -> dict:
    return {
        "ambient": cls.ambient.to_dict(),
        "terms": [
            {"coeff": format_rational(c), "graph": graph_to_dict(k.graph), "decor": decoration_to_dict(k.decor)}
            for k, c in cls.terms
        ],
    }


def class_from_dict(data: dict) -> TautClass:
    amb = Ambient.from_dict(data["ambient"])
    raw = [
        (graph_from_dict(t["graph"]), decoration_from_dict(t["decor"]), parse_rational(t["coeff"]))
        for t in data["terms"]
    ]
    return normalize(amb, raw)


def class_to_json(cls: TautClass) -> str:
    return json.dumps(class_to_dict(cls), sort_keys=True, separators=(",", ":"))


def class_from_json(text: str) -> TautClass:
    return class_from_dict(json.loads(text))


def render_class(cls: TautClass) -> str:
    from .graphs import render_graph

    lines = []
    for k, c in cls.terms:
        d = k.decor
        bits = []
        for i, (p, x) in enumerate(d.legs):
            if p:
                bits.append(f"psi_{i + 1}^{p}")
            if x:
                bits.append(f"xi_{i + 1}^{x}")
        for e, (p, q) in enumerate(d.halfedges):
            if p:
                bits.append(f"psi_e{e}'^{p}")
            if q:
                bits.append(f"psi_e{e}''^{q}")
        for e, x in enumerate(d.edges):
            if x:
                bits.append(f"xi_e{e}^{x}")
        for v, m in enumerate(d.vertices):
            for (a, b), e in m:
                bits.append(f"eta{a}{b}(v{v})^{e}")
        lines.append(f"{format_rational(c)} * [{render_graph(k.graph)}] {' '.join(bits) or '1'}")
    return "\n".join(lines) if lines else "0"
