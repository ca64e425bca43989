"""Formula -> weighted edge multiway cut compiler, and solution lifting in both directions.

Variable gadget for x_i (``A``, ``B`` serve the positive occurrences, ``C`` the negative one)::

    tP --3-- p ==diamond== q ==hat== s --3-- tN
             p-q base (1); p-A, p-B outer; q-A, q-B inner
                           q-s base (1); s-C outer; q-C inner

Clause gadget for a clause with literals l_1..l_k::

    cP --3-- v0 -2- v1 -2- ... -2- vk --3-- cN

where the base v_{r-1}-v_r and the link of l_r form one triangle. The link of
a clause triangle is the same vertex as the matching link of the variable
gadget, so every link vertex carries two variable-side and two clause-side
connectors (one link-structure per occurrence).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

import networkx as nx

from .errors import FormulaError, NotSatisfyingError, ReductionError, SizeGuardError
from .formula import Assignment, Formula, validate_formula
from .graph import EDGE, CutSolution, Instance, MultiGraph, degree_profile, verify_cut

WEIGHTS = frozenset({Fraction(1), Fraction(2), Fraction(3), Fraction(6)})
TERMINAL_WEIGHT = 3
CLAUSE_BASE_WEIGHT = 2
MAX_AMBIGUOUS = 20


@dataclass(frozen=True)
class VariableGadget:
    var: int
    pos_terminal: int
    neg_terminal: int
    p: int
    q: int
    s: int
    links: tuple[int, int, int]  # first positive, second positive, negative occurrence
    diamond_base: int
    diamond_outer: tuple[int, int]
    diamond_inner: tuple[int, int]
    hat_base: int
    hat_outer: int
    hat_inner: int
    terminal_edges: tuple[int, int]

    @property
    def diamond_edges(self) -> tuple[int, ...]:
        return (self.diamond_base, *self.diamond_outer, *self.diamond_inner)

    @property
    def hat_edges(self) -> tuple[int, ...]:
        return (self.hat_base, self.hat_outer, self.hat_inner)


@dataclass(frozen=True)
class ClauseTriangle:
    literal: int
    base: int
    connectors: tuple[int, int]
    link: int
    role: str  # "outer"/"middle" in a size-3 clause, "first"/"second" in a size-2 clause


@dataclass(frozen=True)
class ClauseGadget:
    index: int
    pos_terminal: int
    neg_terminal: int
    path: tuple[int, ...]
    triangles: tuple[ClauseTriangle, ...]
    terminal_edges: tuple[int, int]


@dataclass(frozen=True)
class LinkStructure:
    index: int
    var: int
    clause: int
    literal: int
    link: int
    variable_side: tuple[int, int]
    clause_side: tuple[int, int]


@dataclass(frozen=True)
class Honeycomb:
    replaced: int
    vertices: tuple[int, ...]
    edges: tuple[int, ...]
    attachments: dict  # attaching edge id -> boundary vertex


@dataclass(frozen=True)
class GadgetTrace:
    formula: Formula
    variables: tuple[VariableGadget, ...]
    clauses: tuple[ClauseGadget, ...]
    link_structures: tuple[LinkStructure, ...]
    honeycombs: tuple[Honeycomb, ...] = ()
    rotation_source: str = "embedding"  # or "construction-order" when no planar embedding exists

    @property
    def terminals(self) -> tuple[int, ...]:
        ts = []
        for vg in self.variables:
            ts += [vg.pos_terminal, vg.neg_terminal]
        for cg in self.clauses:
            ts += [cg.pos_terminal, cg.neg_terminal]
        return tuple(ts)

    def edge_roles(self) -> dict[int, str]:
        roles: dict[int, str] = {}
        for vg in self.variables:
            roles[vg.diamond_base] = "variable-base"
            roles[vg.hat_base] = "hat-base"
            for e in (*vg.diamond_outer, vg.hat_outer):
                roles[e] = "connector(outer)"
            for e in (*vg.diamond_inner, vg.hat_inner):
                roles[e] = "connector(inner)"
            for e in vg.terminal_edges:
                roles[e] = "terminal-edge"
        for cg in self.clauses:
            for e in cg.terminal_edges:
                roles[e] = "terminal-edge"
            for tri in cg.triangles:
                roles[tri.base] = "clause-base"
                for e in tri.connectors:
                    roles[e] = f"connector({tri.role})"
        for hc in self.honeycombs:
            for e in hc.edges:
                roles[e] = f"honeycomb({hc.replaced})"
        return roles

    def vertex_roles(self) -> dict[int, str]:
        roles = {}
        for ls in self.link_structures:
            roles[ls.link] = "link"
        for t in self.terminals:
            roles[t] = "terminal"
        return roles

    def honeycomb_edges(self) -> frozenset[int]:
        return frozenset(e for hc in self.honeycombs for e in hc.edges)

    def to_obj(self) -> dict:
        return {
            "edge_roles": {str(k): v for k, v in sorted(self.edge_roles().items())},
            "vertex_roles": {str(k): v for k, v in sorted(self.vertex_roles().items())},
            "variables": [
                {"var": vg.var, "terminals": [vg.pos_terminal, vg.neg_terminal], "links": list(vg.links),
                 "diamond": {"base": vg.diamond_base, "outer": list(vg.diamond_outer), "inner": list(vg.diamond_inner)},
                 "hat": {"base": vg.hat_base, "outer": vg.hat_outer, "inner": vg.hat_inner},
                 "terminal_edges": list(vg.terminal_edges)}
                for vg in self.variables
            ],
            "clauses": [
                {"index": cg.index, "terminals": [cg.pos_terminal, cg.neg_terminal], "path": list(cg.path),
                 "terminal_edges": list(cg.terminal_edges),
                 "triangles": [{"literal": t.literal, "base": t.base, "connectors": list(t.connectors),
                                "link": t.link, "role": t.role} for t in cg.triangles]}
                for cg in self.clauses
            ],
            "link_structures": [
                {"index": ls.index, "var": ls.var, "clause": ls.clause, "literal": ls.literal, "link": ls.link,
                 "variable_side": list(ls.variable_side), "clause_side": list(ls.clause_side)}
                for ls in self.link_structures
            ],
            "honeycombs": [
                {"replaced": hc.replaced, "vertices": len(hc.vertices), "edges": len(hc.edges),
                 "attachments": {str(k): v for k, v in sorted(hc.attachments.items())}}
                for hc in self.honeycombs
            ],
            "rotation_source": self.rotation_source,
        }


def _triangle_roles(k: int) -> list[str]:
    return ["first", "second"] if k == 2 else ["outer", "middle", "outer"]


def compile_weighted(f: Formula) -> tuple[Instance, GadgetTrace]:
    verdict = validate_formula(f)
    if not verdict:
        raise FormulaError(f"invalid formula ({verdict.rule}): {verdict.detail}")
    vertices: list[int] = []
    labels: dict[int, str] = {}
    edges: list[tuple[int, int, int, int]] = []

    def vertex(label: str) -> int:
        v = len(vertices)
        vertices.append(v)
        labels[v] = label
        return v

    def edge(u: int, v: int, w: int) -> int:
        eid = len(edges)
        edges.append((eid, u, v, w))
        return eid

    variables = []
    for i in range(1, f.n + 1):
        tp, p, q, s, tn = (vertex(f"x{i}.{r}") for r in ("tP", "p", "q", "s", "tN"))
        a, b, c = (vertex(f"x{i}.link{r}") for r in ("+1", "+2", "-"))
        t1 = edge(tp, p, TERMINAL_WEIGHT)
        d_base = edge(p, q, 1)
        pa, qa = edge(p, a, 1), edge(q, a, 1)
        pb, qb = edge(p, b, 1), edge(q, b, 1)
        h_base = edge(q, s, 1)
        sc, qc = edge(s, c, 1), edge(q, c, 1)
        t2 = edge(s, tn, TERMINAL_WEIGHT)
        variables.append(VariableGadget(i, tp, tn, p, q, s, (a, b, c), d_base, (pa, pb), (qa, qb),
                                        h_base, sc, qc, (t1, t2)))

    var_side = {}
    for vg in variables:
        var_side[vg.links[0]] = vg.diamond_outer[0], vg.diamond_inner[0]
        var_side[vg.links[1]] = vg.diamond_outer[1], vg.diamond_inner[1]
        var_side[vg.links[2]] = vg.hat_outer, vg.hat_inner

    seen_pos: dict[int, int] = {}
    clauses = []
    links = []
    for j, cl in enumerate(f.clauses):
        cp = vertex(f"C{j + 1}.tP")
        path = [vertex(f"C{j + 1}.v{r}") for r in range(len(cl) + 1)]
        cn = vertex(f"C{j + 1}.tN")
        t1 = edge(cp, path[0], TERMINAL_WEIGHT)
        tris = []
        for r, (lit, role) in enumerate(zip(cl, _triangle_roles(len(cl)))):
            vg = variables[abs(lit) - 1]
            if lit > 0:
                nth = seen_pos.get(lit, 0)
                seen_pos[lit] = nth + 1
                link = vg.links[nth]
            else:
                link = vg.links[2]
            base = edge(path[r], path[r + 1], CLAUSE_BASE_WEIGHT)
            conn = (edge(path[r], link, 1), edge(path[r + 1], link, 1))
            tris.append(ClauseTriangle(lit, base, conn, link, role))
            links.append(LinkStructure(len(links), abs(lit), j, lit, link, var_side[link], conn))
        t2 = edge(path[-1], cn, TERMINAL_WEIGHT)
        clauses.append(ClauseGadget(j, cp, cn, tuple(path), tuple(tris), (t1, t2)))

    rotation, source = _rotation(vertices, edges)
    g = MultiGraph.build(vertices, edges, labels=labels, rotation=rotation)
    trace = GadgetTrace(f, tuple(variables), tuple(clauses), tuple(sorted(links, key=lambda ls: ls.link)),
                        rotation_source=source)
    inst = Instance(g, trace.terminals, Fraction(f.budget), EDGE)
    check_weighted(inst, trace)
    return inst, trace


def _rotation(vertices, edges) -> tuple[dict, str]:
    """Clockwise edge order at every vertex from a planar embedding, else construction order."""
    h = nx.Graph()
    h.add_nodes_from(vertices)
    eid = {}
    for i, u, v, _ in edges:
        h.add_edge(u, v)
        eid[(u, v)] = eid[(v, u)] = i
    planar, emb = nx.check_planarity(h)
    if planar:
        return {v: tuple(eid[(v, u)] for u in emb.neighbors_cw_order(v)) for v in vertices}, "embedding"
    inc = {v: [] for v in vertices}
    for i, u, v, _ in edges:
        inc[u].append(i)
        inc[v].append(i)
    return {v: tuple(o) for v, o in inc.items()}, "construction-order"


def check_weighted(inst: Instance, tr: GadgetTrace) -> None:
    """Post-construction assertions on counts, weights, degrees and budget accounting."""
    g, f = inst.graph, tr.formula

    def need(cond, what):
        if not cond:
            raise ReductionError(f"gadget invariant violated: {what}")

    need(len(tr.link_structures) == 3 * f.n, "3n link-structures")
    need(len(inst.terminals) == 2 * f.n + 2 * f.m, "2n+2m terminals")
    need(all(e.w in WEIGHTS for e in g.edges), "weights in {1,2,3,6}")
    for t in inst.terminals:
        inc = g.incident[t]
        need(len(inc) == 1 and g.edge(inc[0]).w == TERMINAL_WEIGHT, f"terminal {t} has one weight-3 edge")
    need(all(g.edge(vg.diamond_base).w == 1 and g.edge(vg.hat_base).w == 1 for vg in tr.variables),
         "variable bases have weight 1")
    need(all(g.edge(t.base).w == CLAUSE_BASE_WEIGHT for cg in tr.clauses for t in cg.triangles),
         "clause bases have weight 2")
    conn = sum(g.edge(e).w for ls in tr.link_structures for e in ls.variable_side)
    need(conn == 6 * f.n, "variable-side connector weight 6n")
    prof = degree_profile(g, inst.terminals)
    need(prof.max_degree <= 5, "max degree 5")
    need(prof.max_nonterminal_weight <= 8, "non-terminal incident weight <= 8")
    need(all(g.degree(ls.link) == 4 for ls in tr.link_structures), "links joined by four connectors")
    need(inst.budget == f.n + 6 * f.n + 2 * f.m, "budget n + 6n + 2m")


# --- lifting ------------------------------------------------------------------


def assignment_to_cut(f: Formula, a: Assignment, tr: GadgetTrace, inst: Instance | None = None) -> CutSolution:
    """Cut of weight exactly 7n+2m for a satisfying assignment."""
    if not f.satisfied_by(a):
        raise NotSatisfyingError("assignment does not satisfy the formula")
    cut: set[int] = set()
    covered: set[int] = set()  # link vertices whose variable side is already separated
    for vg in tr.variables:
        if a.value(vg.var):
            cut.update(vg.hat_edges)
            covered.add(vg.links[2])
        else:
            cut.update(vg.diamond_edges)
            covered.update(vg.links[:2])
    for cg in tr.clauses:
        tri = next(t for t in cg.triangles if a.value(t.literal))
        cut.add(tri.base)
        cut.update(tri.connectors)
    for ls in tr.link_structures:
        if ls.link not in covered:
            cut.update(ls.clause_side)
    inst = inst or compile_weighted(f)[0]
    sol = CutSolution.of_edges(inst.graph, cut)
    if sol.weight != f.budget or not verify_cut(inst, sol):
        raise ReductionError("lifted cut is not a multiway cut of weight 7n+2m")
    return sol


def read_bases(sol: CutSolution, tr: GadgetTrace) -> dict[int, bool | None]:
    """Value each base reading implies: hat base cut -> True, diamond base cut -> False, else None."""
    out = {}
    for vg in tr.variables:
        d, h = vg.diamond_base in sol.items, vg.hat_base in sol.items
        out[vg.var] = None if d == h else h
    return out


def cut_to_assignment(f: Formula, sol: CutSolution, tr: GadgetTrace, inst: Instance | None = None) -> Assignment:
    """Assignment read off the bases of a cut of weight at most 7n+2m.

    Variables whose gadget has both or neither base cut are tried both ways;
    the first completion that satisfies f wins, otherwise they default to False.
    """
    inst = inst or compile_weighted(f)[0]
    if sol.kind != "edges":
        raise ReductionError("need an edge cut")
    v = verify_cut(inst, sol)
    if not v:
        raise ReductionError(f"not a multiway cut: terminals {v.witness} stay connected")
    if sol.weight > f.budget:
        raise ReductionError(f"cut weight {sol.weight} exceeds the budget {f.budget}")
    reading = read_bases(sol, tr)
    free = [i for i, val in reading.items() if val is None]
    if len(free) > MAX_AMBIGUOUS:
        raise SizeGuardError(f"{len(free)} ambiguous variable gadgets")
    base = {i: bool(val) for i, val in reading.items()}
    for bits in itertools.product((False, True), repeat=len(free)):
        trial = dict(base)
        trial.update(zip(free, bits))
        a = Assignment.from_map(f.n, trial)
        if f.satisfied_by(a):
            return a
    return Assignment.from_map(f.n, base)
