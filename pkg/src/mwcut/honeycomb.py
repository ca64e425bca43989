"""Unweighting: parallel-edge expansion followed by honeycomb replacement of high-degree vertices."""

from __future__ import annotations

import math
from fractions import Fraction
from dataclasses import dataclass, replace
from functools import lru_cache

import networkx as nx

from .errors import ReductionError, UnsafeHoneycombError
from .gadgets import GadgetTrace, Honeycomb
from .graph import Edge, Instance, MultiGraph, components, expand_parallel


@dataclass(frozen=True)
class HoneycombParams:
    rows: int
    cols: int
    sep: int  # minimum gap between consecutive attachment points, counted in boundary attachment slots

    @property
    def perimeter(self) -> int:
        return 2 * (self.rows + self.cols)

    def check(self, attaching: int) -> None:
        """Raise UnsafeHoneycombError unless safe for ``attaching`` attaching edges."""
        if self.rows < 1 or self.cols < 1 or self.sep < 1:
            raise UnsafeHoneycombError(f"rows, cols and sep must be positive, got {self}")
        if not 2 * attaching < self.sep:
            raise UnsafeHoneycombError(f"sep/2 = {self.sep / 2} must exceed the {attaching} attaching edges")
        if self.perimeter < attaching * self.sep:
            raise UnsafeHoneycombError(
                f"perimeter {self.perimeter} is below {attaching} attaching edges x sep {self.sep}")


FULL_SCALE_PARAMS = HoneycombParams(1000, 1000, 100)
DESK_PARAMS = HoneycombParams(40, 40, 20)
MAX_ATTACHING = 8


def min_safe_params(attaching: int) -> HoneycombParams:
    """Smallest square grid that passes ``check`` for the given number of attaching edges."""
    sep = 2 * attaching + 1
    side = math.ceil(attaching * sep / 4)
    return HoneycombParams(side, side, sep)


def hex_vertex_count(rows: int, cols: int) -> int:
    """Vertices of a rows x cols hexagonal grid: 2(rows+1)(cols+1) - 2."""
    return 2 * (rows + 1) * (cols + 1) - 2


def hex_edge_count(rows: int, cols: int) -> int:
    """Edges of a rows x cols hexagonal grid: 3*rows*cols + 2*rows + 2*cols - 1."""
    return 3 * rows * cols + 2 * rows + 2 * cols - 1


@dataclass(frozen=True)
class _Template:
    nodes: tuple
    edges: tuple  # pairs of node indices
    pos: tuple  # (x, y) per node
    slots: tuple  # degree-2 outer-boundary node indices in clockwise order
    rotation: tuple  # clockwise neighbour indices per node
    outer_prev: dict  # boundary slot -> neighbour preceding it on the outer face walk


@lru_cache(maxsize=16)
def _template(rows: int, cols: int) -> _Template:
    h = nx.hexagonal_lattice_graph(rows, cols)
    nodes = tuple(sorted(h.nodes()))
    index = {v: i for i, v in enumerate(nodes)}
    pos = tuple(tuple(h.nodes[v]["pos"]) for v in nodes)
    edges = tuple(sorted((min(index[a], index[b]), max(index[a], index[b])) for a, b in h.edges()))
    nbrs: list[list[int]] = [[] for _ in nodes]
    for a, b in edges:
        nbrs[a].append(b)
        nbrs[b].append(a)

    def angle(v, u):
        return math.atan2(pos[u][1] - pos[v][1], pos[u][0] - pos[v][0])

    # decreasing angle = clockwise
    rotation = tuple(tuple(sorted(nb, key=lambda u, v=v: -angle(v, u))) for v, nb in enumerate(nbrs))
    faces = _faces(rotation)
    boundary = max(faces, key=len)
    deg2 = [v for v in boundary if len(nbrs[v]) == 2]
    # at a boundary vertex the outer face sits right after its predecessor on the walk
    outer_prev = {v: boundary[i - 1] for i, v in enumerate(boundary) if len(nbrs[v]) == 2}
    area = sum(pos[a][0] * pos[b][1] - pos[b][0] * pos[a][1] for a, b in zip(boundary, boundary[1:] + boundary[:1]))
    if area > 0:  # counter-clockwise walk; flip to clockwise
        deg2.reverse()
    return _Template(nodes, edges, pos, tuple(deg2), rotation, outer_prev)


def _faces(rotation) -> list[list[int]]:
    """Face boundaries (vertex sequences) of a simple graph given clockwise rotations."""
    seen = set()
    faces = []
    for v, nb in enumerate(rotation):
        for u in nb:
            if (v, u) in seen:
                continue
            face = []
            x, y = v, u
            while (x, y) not in seen:
                seen.add((x, y))
                face.append(x)
                rot = rotation[y]
                x, y = y, rot[(rot.index(x) + 1) % len(rot)]
            faces.append(face)
    return faces


def honeycomb_slots(rows: int, cols: int) -> int:
    return len(_template(rows, cols).slots)


def _replace_many(g: MultiGraph, plan: list[tuple[int, tuple[int, ...]]], params: HoneycombParams):
    """Replace every (vertex, cyclic edge order) in plan by its own honeycomb."""
    t = _template(params.rows, params.cols)
    nslots = len(t.slots)
    next_v = g.max_vertex + 1
    next_e = g.max_edge + 1
    endpoint: dict[tuple[int, int], int] = {}  # (edge id, replaced vertex) -> attachment vertex
    new_vertices: list[int] = []
    new_edges: list[Edge] = []
    labels = dict(g.labels)
    rotation = dict(g.rotation) if g.rotation is not None else None
    prov = dict(g.provenance)
    combs = []
    replaced = set()
    for v, order in plan:
        inc = g.incident[v]
        if len(inc) <= 3:
            raise ReductionError(f"vertex {v} has degree {len(inc)}; honeycombs replace degree > 3 only")
        if sorted(order) != sorted(inc):
            raise ReductionError(f"attachment order for vertex {v} does not list its incident edges")
        d = len(order)
        if nslots // d < params.sep:
            raise UnsafeHoneycombError(
                f"{nslots} boundary slots cannot space {d} attachments {params.sep} apart")
        ids = list(range(next_v, next_v + len(t.nodes)))
        next_v += len(t.nodes)
        for i, x in enumerate(ids):
            labels[x] = f"hc{v}.{t.nodes[i][0]}.{t.nodes[i][1]}"
        new_vertices += ids
        eids = {}
        comb_edges = []
        for a, b in t.edges:
            eids[(a, b)] = eids[(b, a)] = next_e
            new_edges.append(Edge(next_e, ids[a], ids[b], Fraction(1)))
            prov[next_e] = None
            comb_edges.append(next_e)
            next_e += 1
        attach = {}
        for i, eid in enumerate(order):
            slot = t.slots[(i * nslots) // d]
            attach[eid] = ids[slot]
            endpoint[(eid, v)] = ids[slot]
        if rotation is not None:
            rotation.pop(v, None)
            slot_edge = {t.slots[(i * nslots) // d]: eid for i, eid in enumerate(order)}
            for i, nb in enumerate(t.rotation):
                rot = [eids[(i, u)] for u in nb]
                if i in slot_edge:
                    # the attaching edge goes into the outer face, right after the walk's predecessor
                    at = nb.index(t.outer_prev[i]) + 1
                    rot.insert(at, slot_edge[i])
                rotation[ids[i]] = tuple(rot)
        combs.append(Honeycomb(v, tuple(ids), tuple(comb_edges), attach))
        replaced.add(v)
    edges = []
    for e in g.edges:
        u = endpoint.get((e.id, e.u), e.u)
        w = endpoint.get((e.id, e.v), e.v)
        edges.append(Edge(e.id, u, w, e.w))
    vertices = tuple(x for x in g.vertices if x not in replaced) + tuple(new_vertices)
    for x in replaced:
        labels.pop(x, None)
    out = MultiGraph(vertices, tuple(edges) + tuple(new_edges), labels, rotation, prov)
    return out, combs


def honeycomb_replace(g: MultiGraph, v: int, params: HoneycombParams, order=None) -> MultiGraph:
    """Replace vertex v (degree > 3) by a rows x cols honeycomb; edges attach in ``order``."""
    if v not in g.incident:
        raise ReductionError(f"unknown vertex {v}")
    if order is None:
        order = g.rotation[v] if g.rotation is not None else tuple(g.incident[v])
    out, _ = _replace_many(g, [(v, tuple(order))], params)
    return out


def unweight(inst: Instance, tr: GadgetTrace, params: HoneycombParams = DESK_PARAMS) -> tuple[Instance, GadgetTrace]:
    """Unit-weight subcubic instance with the same budget."""
    g = expand_parallel(inst.graph)
    ts = set(inst.terminals)
    high = [v for v in g.vertices if g.degree(v) > 3]
    if any(v in ts for v in high):
        raise ReductionError("a terminal has degree > 3 after expansion")
    dmax = max((g.degree(v) for v in high), default=0)
    if dmax:
        params.check(dmax)
    plan = [(v, tuple(g.rotation[v]) if g.rotation is not None else tuple(g.incident[v])) for v in high]
    out, combs = _replace_many(g, plan, params)
    if any(out.degree(v) > 3 for v in out.vertices) or not out.is_unit():
        raise ReductionError("unweighted instance is not unit-weight subcubic")
    new_tr = replace(tr, honeycombs=tuple(combs))
    return Instance(out, inst.terminals, inst.budget, inst.kind), new_tr


def rotation_faces(g: MultiGraph) -> int:
    """Number of faces of the rotation system (each edge traversed once per side)."""
    if g.rotation is None:
        raise ReductionError("graph has no rotation system")
    nxt = {}
    for v, order in g.rotation.items():
        for i, eid in enumerate(order):
            nxt[(v, eid)] = order[(i + 1) % len(order)]
    seen = set()
    faces = 0
    for e in g.edges:
        for start in ((e.u, e.id), (e.v, e.id)):
            if start in seen:
                continue
            faces += 1
            dart = start
            while dart not in seen:
                seen.add(dart)
                x, eid = dart
                y = g.edge(eid).other(x)
                dart = (y, nxt[(y, eid)])
    return faces


def rotation_is_planar(g: MultiGraph) -> bool:
    """Euler's formula V - E + F = 2C for the embedding given by the rotation system."""
    comp = components(g)
    c = len(set(comp.values()))
    isolated = sum(1 for v in g.vertices if g.degree(v) == 0)
    return len(g.vertices) - len(g.edges) + rotation_faces(g) + isolated == 2 * c
