"""Reductions onto the node multiway cut variants.

* edge -> node: 2-subdivide, take the line graph, and make one vertex of each
  terminal's clique a terminal;
* deletable terminals -> undeletable: hang a fresh pendant terminal on every terminal;
* vertex cover -> deletable terminals: every vertex becomes a terminal.

``formula_vertex_cover`` is the textbook clause-clique encoding of a CNF as
vertex cover, used to feed formulas into the deletable-terminal pipeline.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import ReductionError
from .graph import EDGE, NODE, NODE_DT, CutSolution, Instance, MultiGraph, line_graph, subdivide, verify_cut
from .solvers.oracles import oracle_emwc


@dataclass(frozen=True)
class TerminalCliqueMap:
    cliques: dict  # original terminal -> line-graph vertices of its incident subdivided edges
    designated: dict  # original terminal -> the clique vertex that becomes a terminal
    subdivided: MultiGraph  # the 2-subdivision whose line graph was taken

    def to_obj(self) -> dict:
        return {
            "cliques": {str(t): list(c) for t, c in sorted(self.cliques.items())},
            "designated": {str(t): d for t, d in sorted(self.designated.items())},
        }


def emwc_to_nmwc(inst: Instance) -> tuple[Instance, TerminalCliqueMap]:
    if inst.kind != EDGE:
        raise ReductionError("emwc_to_nmwc needs an edge instance")
    if not inst.graph.is_unit():
        raise ReductionError("emwc_to_nmwc needs unit weights")
    if len(inst.terminals) < 2:
        raise ReductionError("emwc_to_nmwc needs at least two terminals")
    if any(inst.graph.degree(t) == 0 for t in inst.terminals):
        raise ReductionError("an isolated terminal has no edge to stand in for it")
    g = inst.graph
    # fresh provenance so each sub-edge points at its source edge, not an older ancestor
    bare = MultiGraph.build(g.vertices, [(e.id, e.u, e.v, e.w) for e in g.edges], labels=g.labels)
    sub = subdivide(bare, 2)
    lg, _ = line_graph(sub)
    cliques = {t: tuple(sorted(sub.incident[t])) for t in inst.terminals}
    designated = {t: c[0] for t, c in cliques.items()}
    out = Instance(lg, tuple(designated[t] for t in inst.terminals), inst.budget, NODE)
    return out, TerminalCliqueMap(cliques, designated, sub)


def node_cut_to_edge_cut(src: Instance, cmap: TerminalCliqueMap, sol: CutSolution) -> CutSolution:
    """A node cut of the line graph deletes subdivided edges; cut their original edges."""
    ids = {cmap.subdivided.ancestor(x) for x in sol.items}
    out = CutSolution.of_edges(src.graph, ids)
    if not verify_cut(src, out):
        raise ReductionError("mapped edge cut does not separate the terminals")
    return out


def edge_cut_to_node_cut(src: Instance, dst: Instance, cmap: TerminalCliqueMap, sol: CutSolution) -> CutSolution:
    """Delete the middle third of every cut edge (never a terminal-clique vertex)."""
    sub = cmap.subdivided
    original = set(src.graph.vertices)
    middle = {sub.ancestor(e.id): e.id for e in sub.edges if e.u not in original and e.v not in original}
    out = CutSolution.of_vertices(dst.graph, (middle[e] for e in sol.items))
    if not verify_cut(dst, out):
        raise ReductionError("mapped node cut does not separate the terminals")
    return out


def nmwcdt_to_nmwc(inst: Instance) -> tuple[Instance, dict[int, int]]:
    """Pendant reduction; returns the instance and the map terminal -> its pendant."""
    if inst.kind != NODE_DT:
        raise ReductionError("nmwcdt_to_nmwc needs a node-deletable instance")
    g = inst.graph
    nv = g.max_vertex + 1 if g.vertices else 0
    ne = g.max_edge + 1 if g.edges else 0
    pendants = {}
    vertices = list(g.vertices)
    edges = [(e.id, e.u, e.v, e.w) for e in g.edges]
    labels = dict(g.labels)
    for i, t in enumerate(inst.terminals):
        p = nv + i
        pendants[t] = p
        vertices.append(p)
        labels[p] = f"pendant({labels.get(t, t)})"
        edges.append((ne + i, t, p, 1))
    out = MultiGraph.build(vertices, edges, labels=labels)
    return Instance(out, tuple(pendants[t] for t in inst.terminals), inst.budget, NODE), pendants


def pendant_cut_back(src: Instance, sol: CutSolution) -> CutSolution:
    """A node cut after the pendant reduction avoids the pendants, so it is a deletable cut as is."""
    out = CutSolution.of_vertices(src.graph, sol.items)
    if not verify_cut(src, out):
        raise ReductionError("mapped cut does not separate the terminals")
    return out


def vc_to_nmwcdt(g: MultiGraph, k) -> Instance:
    """Vertex cover of g with budget k as a deletable-terminal node cut with every vertex a terminal."""
    if not g.is_unit():
        raise ReductionError("vertex cover reduction needs an unweighted graph")
    pairs = set()
    for e in g.edges:
        key = (min(e.u, e.v), max(e.u, e.v))
        if key in pairs:
            raise ReductionError("vertex cover reduction needs a simple graph")
        pairs.add(key)
    return Instance(g, tuple(g.vertices), Fraction(k), NODE_DT)


def formula_vertex_cover(f) -> tuple[MultiGraph, int]:
    """Graph and budget with a vertex cover of that size iff ``f`` is satisfiable.

    One edge per variable joins its two literal vertices; each clause is a
    clique with one vertex per occurrence, wired to the matching literal
    vertex. Budget: n plus, per clause, its size minus one.
    """
    labels = {}
    vertices = []
    edges = []

    def lit_vertex(lit: int) -> int:
        return 2 * (abs(lit) - 1) + (0 if lit > 0 else 1)

    for i in range(1, f.n + 1):
        for lit in (i, -i):
            labels[lit_vertex(lit)] = f"x{i}" if lit > 0 else f"~x{i}"
            vertices.append(lit_vertex(lit))
        edges.append((len(edges), lit_vertex(i), lit_vertex(-i)))
    nxt = 2 * f.n
    k = f.n
    for j, clause in enumerate(f.clauses, start=1):
        occ = []
        for r, lit in enumerate(clause):
            labels[nxt] = f"C{j}.{r}"
            vertices.append(nxt)
            edges.append((len(edges), nxt, lit_vertex(lit)))
            occ.append(nxt)
            nxt += 1
        for a in range(len(occ)):
            for b in range(a + 1, len(occ)):
                edges.append((len(edges), occ[a], occ[b]))
        k += len(clause) - 1
    return MultiGraph.build(vertices, edges, labels=labels), k


@dataclass(frozen=True)
class SubdivisionVerdict:
    holds: bool
    before: Fraction
    after: Fraction

    def __bool__(self):
        return self.holds


def one_subdivision_preserves(inst: Instance, force: bool = False) -> SubdivisionVerdict:
    """Exact edge optimum before and after subdividing every edge once."""
    if inst.kind != EDGE or not inst.graph.is_unit():
        raise ReductionError("needs a unit-weight edge instance")
    before = oracle_emwc(inst, force=force).optimum
    if not inst.graph.edges:
        return SubdivisionVerdict(True, before, before)
    sub = Instance(subdivide(inst.graph, 1), inst.terminals, inst.budget, EDGE)
    after = oracle_emwc(sub, force=force, series=True).optimum
    return SubdivisionVerdict(before == after, before, after)
