"""Augmenting-path (Edmonds-Karp) maximum flow on undirected capacitated graphs."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Hashable, Iterable, Mapping

from ..errors import GraphError, UnknownIdError
from ..graph import MultiGraph

_SRC = ("__source__",)
_SNK = ("__sink__",)


@dataclass
class FlowResult:
    value: object
    near_side: set  # vertices reachable from the sources in the residual graph
    far_side: set  # vertices that cannot reach the sinks in the residual graph
    residual: dict

    def flow(self, u, v) -> Fraction:
        """Net flow u -> v across the undirected capacity between them."""
        return Fraction(self.residual[v][u] - self.residual[u][v]) / 2


def _bfs_path(res, s, t):
    parent = {s: None}
    queue = deque([s])
    while queue:
        x = queue.popleft()
        for y, c in res[x].items():
            if c > 0 and y not in parent:
                parent[y] = x
                if y == t:
                    return parent
                queue.append(y)
    return None


def min_cut(adj: Mapping[Hashable, Mapping[Hashable, object]], sources: Iterable, sinks: Iterable) -> FlowResult:
    """Maximum flow from a source set to a sink set.

    ``adj`` is symmetric: ``adj[u][v]`` is the total capacity between u and v.
    Source and sink sets are joined to a super source/sink by uncapacitated arcs.
    """
    sources = set(sources)
    sinks = set(sinks)
    if sources & sinks:
        raise GraphError("source and sink sets overlap")
    res: dict = {u: dict(nb) for u, nb in adj.items()}
    res[_SRC] = {}
    res[_SNK] = {}
    total = sum(c for nb in adj.values() for c in nb.values())
    big = total + 1
    for s in sources:
        res[_SRC][s] = big
        res[s][_SRC] = 0
    for t in sinks:
        res[t][_SNK] = big
        res[_SNK][t] = 0
    value = 0
    while True:
        parent = _bfs_path(res, _SRC, _SNK)
        if parent is None:
            break
        delta = big
        y = _SNK
        while parent[y] is not None:
            x = parent[y]
            delta = min(delta, res[x][y])
            y = x
        y = _SNK
        while parent[y] is not None:
            x = parent[y]
            res[x][y] -= delta
            res[y][x] = res[y].get(x, 0) + delta
            y = x
        value += delta
    queue = deque([_SRC])
    seen = {_SRC}
    while queue:
        x = queue.popleft()
        for y, c in res[x].items():
            if c > 0 and y not in seen:
                seen.add(y)
                queue.append(y)
    near = seen - {_SRC}
    # vertices that can still push to the sink: reverse reachability
    back = {_SNK}
    queue = deque([_SNK])
    while queue:
        y = queue.popleft()
        for x in res[y]:
            if x not in back and res[x].get(y, 0) > 0:
                back.add(x)
                queue.append(x)
    far = set(adj) - back
    return FlowResult(value, near, far, res)


def graph_capacities(g: MultiGraph, scale: int = 1) -> dict:
    adj: dict = {v: {} for v in g.vertices}
    for e in g.edges:
        c = e.w * scale
        c = int(c) if c.denominator == 1 else c
        adj[e.u][e.v] = adj[e.u].get(e.v, 0) + c
        adj[e.v][e.u] = adj[e.v].get(e.u, 0) + c
    return adj


def max_flow_min_cut(g: MultiGraph, s: int, t: int) -> tuple[Fraction, frozenset[int]]:
    """Minimum s-t cut value and the edges leaving the source side of the residual graph."""
    vs = set(g.vertices)
    for x in (s, t):
        if x not in vs:
            raise UnknownIdError("vertex", x)
    if s == t:
        raise GraphError("source and sink coincide")
    r = min_cut(graph_capacities(g), [s], [t])
    cut = frozenset(e.id for e in g.edges if (e.u in r.near_side) != (e.v in r.near_side))
    return Fraction(r.value), cut


def cut_value(g: MultiGraph, side: set) -> Fraction:
    return sum((e.w for e in g.edges if (e.u in side) != (e.v in side)), Fraction(0))
