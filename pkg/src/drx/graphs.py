"""X-valued stable graphs: validation, canonical forms, automorphisms, enumeration.

A graph stores, per vertex, a genus and a vertex label (a curve class for
X-valued graphs, or a 1-tuple ``(d,)`` holding the line-bundle degree for the
prestable graphs of the Picard-type stack).  Legs are indexed by marking, and
each edge is an ordered pair of vertices whose two sides are the two
half-edges; half-edge ``(e, s)`` is side ``s`` of edge ``e``.
"""

from __future__ import annotations

import itertools
import json
import math
from collections import Counter, defaultdict
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Sequence

from .target import CurveClass, TargetModel, effective_splittings

Edge = tuple[int, int]


@dataclass(frozen=True)
class StableGraph:
    genera: tuple[int, ...]
    classes: tuple[CurveClass, ...]
    legs: tuple[int, ...]
    edges: tuple[Edge, ...]

    def __post_init__(self):
        object.__setattr__(self, "genera", tuple(int(x) for x in self.genera))
        object.__setattr__(self, "classes", tuple(tuple(int(y) for y in c) for c in self.classes))
        object.__setattr__(self, "legs", tuple(int(x) for x in self.legs))
        object.__setattr__(self, "edges", tuple((int(a), int(b)) for a, b in self.edges))
        if len(self.genera) != len(self.classes):
            raise ValueError("one class per vertex required")
        nv = len(self.genera)
        if any(not 0 <= v < nv for v in self.legs) or any(not 0 <= v < nv for e in self.edges for v in e):
            raise ValueError("leg or edge refers to a missing vertex")

    @classmethod
    def smooth(cls, g: int, n: int, beta: CurveClass = ()) -> "StableGraph":
        return cls((g,), (tuple(beta),), (0,) * n, ())

    @property
    def num_vertices(self) -> int:
        return len(self.genera)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    @property
    def n(self) -> int:
        return len(self.legs)

    @property
    def h1(self) -> int:
        return first_betti(self)

    @property
    def genus(self) -> int:
        return sum(self.genera) + self.h1

    def total_class(self) -> CurveClass:
        if not self.classes:
            return ()
        return tuple(sum(c) for c in zip(*self.classes))

    def valence(self, v: int) -> int:
        return self.legs.count(v) + sum((a == v) + (b == v) for a, b in self.edges)

    def markings_at(self, v: int) -> tuple[int, ...]:
        """0-based marking indices of the legs at v."""
        return tuple(i for i, x in enumerate(self.legs) if x == v)

    def halfedges_at(self, v: int) -> list[tuple[int, int]]:
        out = []
        for e, (a, b) in enumerate(self.edges):
            if a == v:
                out.append((e, 0))
            if b == v:
                out.append((e, 1))
        return out

    def halfedge_vertex(self, e: int, s: int) -> int:
        return self.edges[e][s]

    def is_connected(self) -> bool:
        nv = self.num_vertices
        if nv == 0:
            return False
        adj = defaultdict(set)
        for a, b in self.edges:
            adj[a].add(b)
            adj[b].add(a)
        seen, stack = {0}, [0]
        while stack:
            v = stack.pop()
            for u in adj[v]:
                if u not in seen:
                    seen.add(u)
                    stack.append(u)
        return len(seen) == nv

    def canonical(self) -> "CanonicalForm":
        return canonicalize(self)


@dataclass(frozen=True)
class CanonicalForm:
    key: bytes
    automorphisms: int


def first_betti(graph: StableGraph) -> int:
    return graph.num_edges - graph.num_vertices + 1


def is_stable_vertex(genus: int, valence: int, cls: CurveClass) -> bool:
    if any(cls):
        return True
    return 2 * genus - 2 + valence > 0


# --- canonical labelling -------------------------------------------------------


def _rank(values: Sequence) -> list[int]:
    order = sorted(set(values))
    index = {x: i for i, x in enumerate(order)}
    return [index[x] for x in values]


def refine_colors(graph: StableGraph, vertex_labels=None, edge_labels=None) -> list[int]:
    """Iterated colour refinement; colours are isomorphism invariant ranks."""
    nv = graph.num_vertices
    vlab = vertex_labels or [()] * nv
    elab = edge_labels or [((), (), ())] * graph.num_edges
    stubs = defaultdict(list)
    for e, (a, b) in enumerate(graph.edges):
        s0, s1, le = elab[e]
        loop = a == b
        stubs[a].append((b, (s0, s1, le, loop)))
        stubs[b].append((a, (s1, s0, le, loop)))
    init = [
        (
            graph.genera[v],
            graph.classes[v],
            vlab[v],
            graph.markings_at(v),
            tuple(sorted(desc for _, desc in stubs[v])),
        )
        for v in range(nv)
    ]
    colors = _rank(init)
    while True:
        sig = [
            (colors[v], tuple(sorted((colors[u], desc) for u, desc in stubs[v])))
            for v in range(nv)
        ]
        new = _rank(sig)
        if len(set(new)) == len(set(colors)):
            return new
        colors = new


def _orderings(colors: list[int]) -> Iterator[list[int]]:
    """Vertex relabellings pos[v] compatible with the colour partition."""
    groups = defaultdict(list)
    for v, c in enumerate(colors):
        groups[c].append(v)
    keys = sorted(groups)
    starts, pos = {}, 0
    for c in keys:
        starts[c] = pos
        pos += len(groups[c])
    for perms in itertools.product(*(itertools.permutations(groups[c]) for c in keys)):
        new = [0] * len(colors)
        for c, perm in zip(keys, perms):
            for i, v in enumerate(perm):
                new[v] = starts[c] + i
        yield new


def _encode(graph: StableGraph, pos: list[int], vlab, elab):
    nv = graph.num_vertices
    inv = [0] * nv
    for v, p in enumerate(pos):
        inv[p] = v
    verts = tuple((graph.genera[v], graph.classes[v], vlab[v]) for v in inv)
    legs = tuple(pos[v] for v in graph.legs)
    rows = []
    for e, (a, b) in enumerate(graph.edges):
        s0, s1, le = elab[e]
        u, w = pos[a], pos[b]
        if (u, s0) > (w, s1):
            rows.append(((w, u, s1, s0, le), e, True))
        else:
            rows.append(((u, w, s0, s1, le), e, False))
    rows.sort(key=lambda t: t[0])
    return (verts, legs, tuple(r[0] for r in rows)), rows


def canonical_labelling(graph: StableGraph, vertex_labels=None, edge_labels=None):
    """Minimal encoding over colour-compatible relabellings.

    Returns ``(encoding, pos, rows, count)`` where ``pos`` is one optimal vertex
    relabelling, ``rows`` lists ``(edge_row, old_edge, flipped)`` in canonical
    edge order, and ``count`` is the number of optimal relabellings (the order
    of the vertex part of the automorphism group).
    """
    nv = graph.num_vertices
    vlab = list(vertex_labels) if vertex_labels is not None else [()] * nv
    elab = list(edge_labels) if edge_labels is not None else [((), (), ())] * graph.num_edges
    colors = refine_colors(graph, vlab, elab)
    best = None
    count = 0
    for pos in _orderings(colors):
        enc, rows = _encode(graph, pos, vlab, elab)
        if best is None or enc < best[0]:
            best = (enc, pos, rows)
            count = 1
        elif enc == best[0]:
            count += 1
    return best[0], best[1], best[2], count


@lru_cache(maxsize=200_000)
def canonicalize(graph: StableGraph) -> CanonicalForm:
    enc, _, rows, count = canonical_labelling(graph)
    aut = count
    for row, m in Counter(r[0] for r in rows).items():
        aut *= math.factorial(m)
        if row[0] == row[1]:
            aut *= 2**m
    return CanonicalForm(repr(enc).encode(), aut)


def automorphism_count(graph: StableGraph) -> int:
    return canonicalize(graph).automorphisms


@lru_cache(maxsize=200_000)
def canonical_graph(graph: StableGraph) -> StableGraph:
    enc, _, _, _ = canonical_labelling(graph)
    verts, legs, rows = enc
    return StableGraph(
        tuple(v[0] for v in verts),
        tuple(v[1] for v in verts),
        legs,
        tuple((r[0], r[1]) for r in rows),
    )


# --- validation ----------------------------------------------------------------


def validate(graph: StableGraph, g: int, n: int, beta: CurveClass, target: TargetModel) -> list[str]:
    """Names of the violated conditions; an empty list means the graph is valid."""
    problems = []
    nv = graph.num_vertices
    if nv == 0:
        return ["vertices"]
    if len(graph.legs) != n or any(not 0 <= v < nv for v in graph.legs):
        problems.append("legs")
    if any(not (0 <= a < nv and 0 <= b < nv) for a, b in graph.edges):
        return problems + ["edges"]
    if any(x < 0 for x in graph.genera):
        problems.append("genus")
    if not graph.is_connected():
        problems.append("connected")
    elif sum(graph.genera) + graph.h1 != g:
        problems.append("genus")
    if any(not target.is_effective(c) for c in graph.classes):
        problems.append("effective")
    if any(
        not is_stable_vertex(graph.genera[v], graph.valence(v), graph.classes[v]) for v in range(nv)
    ):
        problems.append("stability")
    if graph.total_class() != tuple(beta) and not (target.rank == 0 and all(c == () for c in graph.classes)):
        problems.append("degree")
    return problems


# --- enumeration ------------------------------------------------------------------


def _compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def _connected_edges(nv: int, edges) -> bool:
    root = list(range(nv))

    def find(x):
        while root[x] != x:
            root[x] = root[root[x]]
            x = root[x]
        return x

    parts = nv
    for a, b in edges:
        ra, rb = find(a), find(b)
        if ra != rb:
            root[ra] = rb
            parts -= 1
    return parts == 1


@lru_cache(maxsize=None)
def _shapes(nv: int, ne: int) -> tuple[tuple[Edge, ...], ...]:
    """Connected multigraphs (loops allowed) on nv vertices with ne edges, up to isomorphism."""
    pairs = [(a, b) for a in range(nv) for b in range(a, nv)]
    out = {}
    for edges in itertools.combinations_with_replacement(pairs, ne):
        deg = [0] * nv
        for a, b in edges:
            deg[a] += 1
            deg[b] += 1
        # every class has a labelling with non-increasing degrees
        if any(deg[v] < deg[v + 1] for v in range(nv - 1)) or not _connected_edges(nv, edges):
            continue
        key = canonicalize(StableGraph((0,) * nv, ((),) * nv, (), edges)).key
        out.setdefault(key, edges)
    return tuple(out[k] for k in sorted(out))


def enumerate_stable_graphs(
    g: int, n: int, beta: CurveClass, target: TargetModel, max_edges: int
) -> list[StableGraph]:
    """One canonical representative per isomorphism class with at most max_edges edges."""
    beta = tuple(beta)
    if not target.is_effective(beta):
        raise ValueError(f"class {beta} is not effective")
    found: dict[bytes, StableGraph] = {}
    for ne in range(max_edges + 1):
        for nv in range(1, ne + 2):
            h1 = ne - nv + 1
            if h1 > g:
                continue
            splits = effective_splittings(target, beta, nv)
            for edges in _shapes(nv, ne):
                edge_val = [sum((a == v) + (b == v) for a, b in edges) for v in range(nv)]
                for genera in _compositions(g - h1, nv):
                    for legs in itertools.product(range(nv), repeat=n):
                        val = list(edge_val)
                        for v in legs:
                            val[v] += 1
                        for classes in splits:
                            if not all(is_stable_vertex(genera[v], val[v], classes[v]) for v in range(nv)):
                                continue
                            graph = StableGraph(genera, classes, legs, edges)
                            form = canonicalize(graph)
                            if form.key not in found:
                                found[form.key] = canonical_graph(graph)
    return [found[k] for k in sorted(found)]


# --- contraction and explicit isomorphisms (used by the strata product) --------


def contract(graph: StableGraph, keep) -> tuple[StableGraph, list[int], dict[int, int]]:
    """Contract every edge not in ``keep``.

    Returns the contracted graph, the vertex map, and a map from kept edge
    indices to their new indices (orientation is preserved).
    """
    keep = set(keep)
    parent = list(range(graph.num_vertices))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for e, (a, b) in enumerate(graph.edges):
        if e not in keep:
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)
    roots = sorted({find(v) for v in range(graph.num_vertices)})
    index = {r: i for i, r in enumerate(roots)}
    vmap = [index[find(v)] for v in range(graph.num_vertices)]
    genera = [0] * len(roots)
    classes = [None] * len(roots)
    for v in range(graph.num_vertices):
        w = vmap[v]
        genera[w] += graph.genera[v]
        c = graph.classes[v]
        classes[w] = c if classes[w] is None else tuple(x + y for x, y in zip(classes[w], c))
    counts = Counter(vmap)
    removed = Counter(vmap[a] for e, (a, b) in enumerate(graph.edges) if e not in keep)
    for w in range(len(roots)):
        genera[w] += removed[w] - (counts[w] - 1)
    new_edges, emap = [], {}
    for e, (a, b) in enumerate(graph.edges):
        if e in keep:
            emap[e] = len(new_edges)
            new_edges.append((vmap[a], vmap[b]))
    legs = tuple(vmap[v] for v in graph.legs)
    return StableGraph(tuple(genera), tuple(classes), legs, tuple(new_edges)), vmap, emap


def _vertex_invariant(graph: StableGraph, v: int):
    loops = sum(1 for a, b in graph.edges if a == b == v)
    return (graph.genera[v], graph.classes[v], graph.markings_at(v), graph.valence(v), loops)


def isomorphisms(g1: StableGraph, g2: StableGraph) -> Iterator[tuple[tuple[int, ...], tuple[tuple[int, bool], ...]]]:
    """All isomorphisms g1 -> g2 fixing leg labels.

    Each is ``(vmap, emap)`` with ``emap[e] = (e2, flipped)``; ``flipped`` means
    side 0 of e goes to side 1 of e2.
    """
    if (
        g1.num_vertices != g2.num_vertices
        or g1.num_edges != g2.num_edges
        or g1.n != g2.n
        or sorted(g1.genera) != sorted(g2.genera)
    ):
        return
    inv1 = [_vertex_invariant(g1, v) for v in range(g1.num_vertices)]
    inv2 = [_vertex_invariant(g2, v) for v in range(g2.num_vertices)]
    if sorted(inv1) != sorted(inv2):
        return
    groups1, groups2 = defaultdict(list), defaultdict(list)
    for v, x in enumerate(inv1):
        groups1[x].append(v)
    for v, x in enumerate(inv2):
        groups2[x].append(v)
    keys = sorted(groups1)
    target_edges = Counter(tuple(sorted(e)) for e in g2.edges)
    by_pair2 = defaultdict(list)
    for e, (a, b) in enumerate(g2.edges):
        by_pair2[tuple(sorted((a, b)))].append(e)
    for perms in itertools.product(*(itertools.permutations(groups2[k]) for k in keys)):
        vmap = [0] * g1.num_vertices
        for k, perm in zip(keys, perms):
            for src, dst in zip(groups1[k], perm):
                vmap[src] = dst
        mapped = Counter(tuple(sorted((vmap[a], vmap[b]))) for a, b in g1.edges)
        if mapped != target_edges:
            continue
        by_pair1 = defaultdict(list)
        for e, (a, b) in enumerate(g1.edges):
            by_pair1[tuple(sorted((vmap[a], vmap[b])))].append(e)
        choices = []
        for pair, es1 in by_pair1.items():
            es2 = by_pair2[pair]
            options = []
            for perm in itertools.permutations(es2):
                if pair[0] == pair[1]:
                    for flips in itertools.product((False, True), repeat=len(es1)):
                        options.append(tuple(zip(es1, perm, flips)))
                else:
                    options.append(
                        tuple((e1, e2, vmap[g1.edges[e1][0]] != g2.edges[e2][0]) for e1, e2 in zip(es1, perm))
                    )
            choices.append(options)
        for combo in itertools.product(*choices):
            emap = [None] * g1.num_edges
            for block in combo:
                for e1, e2, flip in block:
                    emap[e1] = (e2, flip)
            yield tuple(vmap), tuple(emap)


# --- serialization -------------------------------------------------------------


def halfedge_slots(graph: StableGraph) -> tuple[list[int], list[tuple[int, int]]]:
    """Local slot numbers: legs first (by marking), then edge ends in edge order."""
    nxt = [0] * graph.num_vertices
    leg_slots = []
    for i in range(graph.n):
        v = graph.legs[i]
        leg_slots.append(nxt[v])
        nxt[v] += 1
    edge_slots = []
    for a, b in graph.edges:
        sa = nxt[a]
        nxt[a] += 1
        sb = nxt[b]
        nxt[b] += 1
        edge_slots.append((sa, sb))
    return leg_slots, edge_slots


def graph_to_dict(graph: StableGraph) -> dict:
    _, edge_slots = halfedge_slots(graph)
    return {
        "vertices": [{"g": g, "beta": list(c)} for g, c in zip(graph.genera, graph.classes)],
        "legs": [{"marking": i + 1, "vertex": v} for i, v in enumerate(graph.legs)],
        "edges": [[[a, sa], [b, sb]] for (a, b), (sa, sb) in zip(graph.edges, edge_slots)],
    }


def graph_from_dict(data: dict) -> StableGraph:
    legs = sorted(data["legs"], key=lambda x: x["marking"])
    if [x["marking"] for x in legs] != list(range(1, len(legs) + 1)):
        raise ValueError("markings must be 1..n")
    return StableGraph(
        tuple(v["g"] for v in data["vertices"]),
        tuple(tuple(v["beta"]) for v in data["vertices"]),
        tuple(x["vertex"] for x in legs),
        tuple((e[0][0], e[1][0]) for e in data["edges"]),
    )


def graph_to_json(graph: StableGraph) -> str:
    return json.dumps(graph_to_dict(graph), sort_keys=True, separators=(",", ":"))


def render_graph(graph: StableGraph) -> str:
    parts = []
    for v in range(graph.num_vertices):
        marks = ",".join(str(i + 1) for i in graph.markings_at(v)) or "-"
        cls = "" if graph.classes[v] == () else f" beta={list(graph.classes[v])}"
        parts.append(f"v{v}[g={graph.genera[v]}{cls} legs={marks}]")
    edges = " ".join(f"v{a}-v{b}" for a, b in graph.edges) or "(no edges)"
    return " ".join(parts) + " | " + edges
