"""Small hand-built and seeded instances for the audits and their negative controls."""

from __future__ import annotations

import random
from dataclasses import replace

from .gadgets import GadgetTrace
from .graph import EDGE, Instance, MultiGraph
from .honeycomb import HoneycombParams, honeycomb_replace, min_safe_params

CENTRE = 0


def honeycomb_fixture(seed: int, d: int | None = None, params: HoneycombParams | None = None) -> Instance:
    """One vertex of degree d (4 or 5) replaced by a safe honeycomb.

    Each neighbour of the centre is either a terminal or reaches its own
    terminal along a short path; some consecutive neighbours are joined by
    rim edges, keeping every vertex subcubic. Everything is unit weight.
    """
    rng = random.Random(f"hc-fixture:{seed}")
    d = d or rng.choice((4, 4, 4, 5))
    params = params or min_safe_params(d)
    params.check(d)
    vertices = [CENTRE]
    edges: list[tuple] = []
    terminals = []
    nxt = 1

    def add_vertex():
        nonlocal nxt
        vertices.append(nxt)
        nxt += 1
        return nxt - 1

    order = []
    nbrs = []
    for _ in range(d):
        u = add_vertex()
        nbrs.append(u)
        order.append(len(edges))
        edges.append((len(edges), CENTRE, u))
        hops = rng.choice((0, 1, 1, 2))
        tail = u
        for _ in range(hops):
            x = add_vertex()
            edges.append((len(edges), tail, x))
            tail = x
        terminals.append(tail)
    deg = {v: sum(1 for e in edges if v in e[1:]) for v in nbrs}
    for i in range(d):
        a, b = nbrs[i], nbrs[(i + 1) % d]
        if rng.random() < 0.3 and a not in terminals and b not in terminals and deg[a] < 3 and deg[b] < 3:
            edges.append((len(edges), a, b))
            deg[a] += 1
            deg[b] += 1
    g = MultiGraph.build(vertices, edges)
    h = honeycomb_replace(g, CENTRE, params, order=tuple(order))
    return Instance(h, tuple(terminals), 0, EDGE)


def heavy_terminal_edge_control() -> Instance:
    """A weight-5 edge between two terminals: every optimum contains it, but it sits at terminals only."""
    #   t0 --5-- t1,  v joined to t0 (2), t1 (1), t2 (1)
    g = MultiGraph.build([0, 1, 2, 3], [(0, 0, 1, 5), (1, 3, 0, 2), (2, 3, 1, 1), (3, 3, 2, 1)])
    return Instance(g, (0, 1, 2), 0, EDGE)


def unsafe_honeycomb_control() -> Instance:
    """Weight-3 attaching edges into a 2x2 honeycomb: isolating an attachment inside the grid is cheaper."""
    d = 4
    vertices = [CENTRE] + list(range(1, d + 1))
    edges = [(i, CENTRE, i + 1, 3) for i in range(d)]
    g = MultiGraph.build(vertices, edges)
    h = honeycomb_replace(g, CENTRE, HoneycombParams(2, 2, 1), order=tuple(range(d)))
    return Instance(h, tuple(range(1, d + 1)), 0, EDGE)


def forced_heavy_edge_family() -> tuple[Instance, list[frozenset[int]]]:
    """A genuine heavy edge plus a fabricated family in which every cut contains it.

    Centre 1 has edges 3 (to t0), 1 (to t2), 1 (to t3). The true optimum cuts
    the two light edges; the supplied family only holds {heavy, one light}.
    """
    g = MultiGraph.build([0, 1, 2, 3], [(0, 0, 1, 3), (1, 1, 2, 1), (2, 1, 3, 1)])
    return Instance(g, (0, 2, 3), 0, EDGE), [frozenset({0, 1})]


def redundant_cut_family() -> tuple[Instance, list[frozenset[int]]]:
    """Triangle 0-1-3 with a tail 1-2; the supplied cut also removes 0-1, which the cycle 0-1-3 still bridges."""
    g = MultiGraph.build([0, 1, 2, 3], [(0, 0, 1), (1, 1, 2), (2, 0, 3), (3, 3, 1)])
    return Instance(g, (0, 2), 0, EDGE), [frozenset({0, 1})]


def corrupt_link_trace(tr: GadgetTrace, inst: Instance) -> GadgetTrace:
    """Point the first link-structure at variable terminal edges, which no optimum cuts."""
    vg = tr.variables[0]
    ls = replace(tr.link_structures[0], variable_side=vg.terminal_edges[:1], clause_side=vg.terminal_edges[1:2])
    return replace(tr, link_structures=(ls,) + tuple(tr.link_structures[1:]))


def random_unit_instance(rng: random.Random, max_edges: int = 18, max_vertices: int = 9,
                         min_terminals: int = 2, max_terminals: int = 4) -> Instance:
    """Connected-ish random unit multigraph with a few terminals, for the micro corpora."""
    nv = rng.randint(max(3, min_terminals), max_vertices)
    ne = rng.randint(nv - 1, min(max_edges, nv * (nv - 1) // 2 + 2))
    edges = []
    for v in range(1, nv):
        edges.append((len(edges), rng.randrange(v), v))
    while len(edges) < ne:
        a, b = rng.sample(range(nv), 2)
        edges.append((len(edges), a, b))
    k = rng.randint(min_terminals, min(max_terminals, nv))
    terms = tuple(sorted(rng.sample(range(nv), k)))
    return Instance(MultiGraph.build(range(nv), edges), terms, 0, EDGE)


def random_weighted_instance(rng: random.Random, max_edges: int = 14, max_vertices: int = 8,
                             weights=(1, 2, 3)) -> Instance:
    base = random_unit_instance(rng, max_edges, max_vertices)
    g = base.graph
    edges = [(e.id, e.u, e.v, rng.choice(weights)) for e in g.edges]
    return Instance(MultiGraph.build(g.vertices, edges), base.terminals, 0, EDGE)
