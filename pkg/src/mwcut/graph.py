"""Weighted multigraphs, multiway-cut instances and the shared graph transformations."""

from __future__ import annotations

from collections import defaultdict, deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping

from .errors import GraphError, UndeletableTerminalError, UnknownIdError

EDGE = "edge"
NODE = "node"
NODE_DT = "node-deletable"
KINDS = (EDGE, NODE, NODE_DT)


def as_weight(w) -> Fraction:
    if isinstance(w, str):
        w = Fraction(w)
    elif isinstance(w, float):
        raise GraphError(f"weights must be exact rationals, got float {w!r}")
    return Fraction(w)


@dataclass(frozen=True)
class Edge:
    id: int
    u: int
    v: int
    w: Fraction = Fraction(1)

    def other(self, x: int) -> int:
        return self.v if x == self.u else self.u


@dataclass(frozen=True, eq=False)
class MultiGraph:
    """Undirected multigraph with stable integer edge ids.

    ``provenance`` maps an edge id to the id of the edge it was derived from
    (``None`` marks an edge created fresh by a transformation).
    """

    vertices: tuple[int, ...]
    edges: tuple[Edge, ...]
    labels: Mapping[int, str] = field(default_factory=dict)
    rotation: Mapping[int, tuple[int, ...]] | None = None
    provenance: Mapping[int, int | None] = field(default_factory=dict)

    def __post_init__(self):
        vset = set(self.vertices)
        if len(vset) != len(self.vertices):
            raise GraphError("duplicate vertex ids")
        seen = set()
        for e in self.edges:
            if e.id in seen:
                raise GraphError(f"duplicate edge id {e.id}")
            seen.add(e.id)
            if e.u == e.v:
                raise GraphError(f"self-loop on vertex {e.u} (edge {e.id})")
            for x in (e.u, e.v):
                if x not in vset:
                    raise UnknownIdError("vertex", x)
            if not isinstance(e.w, Fraction) or e.w <= 0:
                raise GraphError(f"edge {e.id} has non-positive or inexact weight {e.w!r}")
        if self.rotation is not None:
            inc = self.incident
            for x, order in self.rotation.items():
                if x not in vset:
                    raise UnknownIdError("vertex", x)
                if sorted(order) != sorted(inc[x]):
                    raise GraphError(f"rotation at vertex {x} does not list its incident edges exactly once")

    @classmethod
    def build(cls, vertices: Iterable[int], edges: Iterable[tuple], labels=None, rotation=None, provenance=None):
        """Build from ``(id, u, v[, w])`` tuples."""
        es = []
        for rec in edges:
            eid, u, v, *rest = rec
            es.append(Edge(eid, u, v, as_weight(rest[0]) if rest else Fraction(1)))
        return cls(tuple(vertices), tuple(es), dict(labels or {}), rotation, dict(provenance or {}))

    @cached_property
    def edge_map(self) -> dict[int, Edge]:
        return {e.id: e for e in self.edges}

    @cached_property
    def incident(self) -> dict[int, list[int]]:
        inc: dict[int, list[int]] = {v: [] for v in self.vertices}
        for e in self.edges:
            inc[e.u].append(e.id)
            inc[e.v].append(e.id)
        return inc

    def edge(self, eid: int) -> Edge:
        try:
            return self.edge_map[eid]
        except KeyError:
            raise UnknownIdError("edge", eid) from None

    def degree(self, v: int) -> int:
        return len(self.incident[v])

    def weighted_degree(self, v: int) -> Fraction:
        return sum((self.edge_map[i].w for i in self.incident[v]), Fraction(0))

    def neighbors(self, v: int) -> list[int]:
        return [self.edge_map[i].other(v) for i in self.incident[v]]

    @property
    def max_vertex(self) -> int:
        return max(self.vertices, default=-1)

    @property
    def max_edge(self) -> int:
        return max((e.id for e in self.edges), default=-1)

    def total_weight(self) -> Fraction:
        return sum((e.w for e in self.edges), Fraction(0))

    def is_unit(self) -> bool:
        return all(e.w == 1 for e in self.edges)

    def ancestor(self, eid: int) -> int | None:
        return self.provenance.get(eid, eid)

    def simplification_edge_count(self) -> int:
        return len({frozenset((e.u, e.v)) for e in self.edges})

    def euler_lint(self) -> bool:
        """Necessary condition for planarity: m <= 3n - 6 on the simple underlying graph."""
        n = len(self.vertices)
        m = self.simplification_edge_count()
        return n < 3 or m <= 3 * n - 6


@dataclass(frozen=True, eq=False)
class Instance:
    graph: MultiGraph
    terminals: tuple[int, ...]
    budget: Fraction = Fraction(0)
    kind: str = EDGE

    def __post_init__(self):
        if self.kind not in KINDS:
            raise GraphError(f"unknown problem kind {self.kind!r}")
        if len(set(self.terminals)) != len(self.terminals):
            raise GraphError("terminals must be distinct")
        vs = set(self.graph.vertices)
        for t in self.terminals:
            if t not in vs:
                raise UnknownIdError("vertex", t)
        if self.budget < 0:
            raise GraphError("budget must be nonnegative")

    def with_budget(self, k) -> Instance:
        return Instance(self.graph, self.terminals, as_weight(k), self.kind)


@dataclass(frozen=True)
class CutSolution:
    kind: str  # "edges" or "vertices"
    items: frozenset[int]
    weight: Fraction
    components: Mapping[int, int] = field(default_factory=dict, compare=False)

    @classmethod
    def of_edges(cls, g: MultiGraph, ids: Iterable[int]) -> CutSolution:
        ids = frozenset(ids)
        w = sum((g.edge(i).w for i in ids), Fraction(0))
        return cls("edges", ids, w, components(g, removed_edges=ids))

    @classmethod
    def of_vertices(cls, g: MultiGraph, ids: Iterable[int]) -> CutSolution:
        ids = frozenset(ids)
        return cls("vertices", ids, Fraction(len(ids)), components(g, removed_vertices=ids))

    def sorted_items(self) -> list[int]:
        return sorted(self.items)


@dataclass(frozen=True)
class Verdict:
    valid: bool
    witness: tuple[int, int] | None = None

    def __bool__(self):
        return self.valid


def components(g: MultiGraph, removed_edges: Iterable[int] = (), removed_vertices: Iterable[int] = ()) -> dict[int, int]:
    """Component index of every surviving vertex, numbered by smallest contained vertex id."""
    rem_e = set(removed_edges)
    rem_v = set(removed_vertices)
    for i in rem_e:
        if i not in g.edge_map:
            raise UnknownIdError("edge", i)
    vset = set(g.vertices)
    for x in rem_v:
        if x not in vset:
            raise UnknownIdError("vertex", x)
    comp: dict[int, int] = {}
    idx = 0
    for s in sorted(vset - rem_v):
        if s in comp:
            continue
        comp[s] = idx
        queue = deque([s])
        while queue:
            x = queue.popleft()
            for eid in g.incident[x]:
                if eid in rem_e:
                    continue
                y = g.edge_map[eid].other(x)
                if y in rem_v or y in comp:
                    continue
                comp[y] = idx
                queue.append(y)
        idx += 1
    return comp


def verify_cut(inst: Instance, sol: CutSolution) -> Verdict:
    g = inst.graph
    if inst.kind == EDGE:
        if sol.kind != "edges":
            raise GraphError("edge instance needs an edge-set solution")
        comp = components(g, removed_edges=sol.items)
    else:
        if sol.kind != "vertices":
            raise GraphError("node instance needs a vertex-set solution")
        if inst.kind == NODE:
            bad = sorted(set(inst.terminals) & sol.items)
            if bad:
                raise UndeletableTerminalError(bad[0])
        comp = components(g, removed_vertices=sol.items)
    owner: dict[int, int] = {}
    for t in inst.terminals:
        if t not in comp:
            continue
        c = comp[t]
        if c in owner:
            return Verdict(False, (owner[c], t))
        owner[c] = t
    return Verdict(True)


def _fresh_counter(start: int):
    n = start
    while True:
        n += 1
        yield n


def line_graph(g: MultiGraph) -> tuple[MultiGraph, dict[int, int]]:
    """Line graph; edge ``e`` of ``g`` becomes vertex ``e.id``.

    Two parallel edges share both endpoints but give a single adjacency.
    """
    if not g.edges:
        raise GraphError("line graph of an edgeless graph is empty")
    mapping = {e.id: e.id for e in g.edges}
    pairs = set()
    for v in g.vertices:
        inc = sorted(g.incident[v])
        for i, a in enumerate(inc):
            for b in inc[i + 1:]:
                pairs.add((a, b))
    edges = [(i, a, b) for i, (a, b) in enumerate(sorted(pairs))]
    labels = {e.id: f"e{e.id}" for e in g.edges}
    return MultiGraph.build(sorted(mapping.values()), edges, labels=labels), mapping


def subdivide(g: MultiGraph, ell: int) -> MultiGraph:
    """Replace every edge by a path of ``ell + 1`` unit-weight edges."""
    if ell < 1:
        raise GraphError("subdivision length must be >= 1")
    new_v = _fresh_counter(g.max_vertex)
    new_e = _fresh_counter(g.max_edge)
    vertices = list(g.vertices)
    labels = dict(g.labels)
    edges = []
    prov = {}
    for e in g.edges:
        path = [e.u]
        for k in range(ell):
            x = next(new_v)
            vertices.append(x)
            labels[x] = f"sub{e.id}.{k}"
            path.append(x)
        path.append(e.v)
        for a, b in zip(path, path[1:]):
            eid = next(new_e)
            edges.append((eid, a, b, 1))
            prov[eid] = g.ancestor(e.id)
    return MultiGraph.build(vertices, edges, labels=labels, provenance=prov)


def expand_parallel(g: MultiGraph) -> MultiGraph:
    """Replace an edge of integer weight j by j parallel unit edges."""
    new_e = _fresh_counter(g.max_edge)
    edges = []
    prov = {}
    copies: dict[int, list[int]] = {}
    for e in g.edges:
        if e.w.denominator != 1:
            raise GraphError(f"edge {e.id} has non-integral weight {e.w}")
        copies[e.id] = []
        for _ in range(int(e.w)):
            eid = next(new_e)
            edges.append((eid, e.u, e.v, 1))
            prov[eid] = g.ancestor(e.id)
            copies[e.id].append(eid)
    rotation = None
    if g.rotation is not None:
        # copies nest, so they appear in reverse order around the far endpoint
        rotation = {
            v: tuple(c for eid in order for c in (copies[eid] if g.edge(eid).u == v else copies[eid][::-1]))
            for v, order in g.rotation.items()
        }
    return MultiGraph.build(g.vertices, edges, labels=g.labels, rotation=rotation, provenance=prov)


@dataclass(frozen=True)
class DegreeProfile:
    max_degree: int
    max_terminal_weight: Fraction
    max_nonterminal_weight: Fraction
    max_terminal_degree: int

    def as_dict(self) -> dict:
        return {
            "max_degree": self.max_degree,
            "max_terminal_degree": self.max_terminal_degree,
            "max_terminal_weight": str(self.max_terminal_weight),
            "max_nonterminal_weight": str(self.max_nonterminal_weight),
        }


def degree_profile(g: MultiGraph, terminals: Iterable[int] = ()) -> DegreeProfile:
    ts = set(terminals)
    md = mtd = 0
    mtw = mnw = Fraction(0)
    for v in g.vertices:
        d = g.degree(v)
        w = g.weighted_degree(v)
        md = max(md, d)
        if v in ts:
            mtd = max(mtd, d)
            mtw = max(mtw, w)
        else:
            mnw = max(mnw, w)
    return DegreeProfile(md, mtw, mnw, mtd)


def adjacency_lists(g: MultiGraph) -> dict[int, list[tuple[int, int]]]:
    """``v -> [(neighbor, edge id), ...]``."""
    adj = defaultdict(list)
    for e in g.edges:
        adj[e.u].append((e.v, e.id))
        adj[e.v].append((e.u, e.id))
    return adj
