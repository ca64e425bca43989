from fractions import Fraction

import networkx as nx
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from mwcut.errors import ReductionError
from mwcut.formula import Formula, brute_force_sat, gen_formula
from mwcut.graph import NODE_DT, Instance, MultiGraph, verify_cut
from mwcut.harness import load_corpus
from mwcut.node_reductions import (
    edge_cut_to_node_cut, emwc_to_nmwc, formula_vertex_cover, nmwcdt_to_nmwc, node_cut_to_edge_cut,
    one_subdivision_preserves, pendant_cut_back, vc_to_nmwcdt,
)
from mwcut.solvers.node_bnb import solve_exact_nmwc, solve_exact_nmwc_dt
from mwcut.solvers.oracles import oracle_emwc, oracle_nmwc, oracle_nmwc_dt

from strategies import edge_instances, multigraphs, reference_emwc, reference_node, reference_vertex_cover


def simple(g: MultiGraph) -> MultiGraph:
    pairs = sorted({(min(e.u, e.v), max(e.u, e.v)) for e in g.edges})
    return MultiGraph.build(g.vertices, [(i, a, b) for i, (a, b) in enumerate(pairs)])


def triangle():
    return MultiGraph.build([0, 1, 2], [(0, 0, 1), (1, 1, 2), (2, 0, 2)])


# --- edge -> node -------------------------------------------------------------------------


def test_path_example():
    g = MultiGraph.build([0, 1, 2], [(0, 0, 1), (1, 1, 2)])
    inst = Instance(g, (0, 2))
    node, cmap = emwc_to_nmwc(inst)
    assert reference_emwc(inst) == 1
    assert reference_node(node.graph, node.terminals, deletable=False) == 1
    assert oracle_nmwc(node).optimum == 1
    assert len(node.graph.vertices) == 3 * len(g.edges)


def test_weighted_input_rejected():
    g = MultiGraph.build([0, 1], [(0, 0, 1, 2)])
    with pytest.raises(ReductionError, match="unit weights"):
        emwc_to_nmwc(Instance(g, (0, 1)))


def test_single_terminal_rejected():
    with pytest.raises(ReductionError):
        emwc_to_nmwc(Instance(triangle(), (0,)))


@given(edge_instances(max_vertices=6, max_edges=6, min_terminals=2))
def test_edge_node_optima_equal(inst):
    assume(all(inst.graph.degree(t) > 0 for t in inst.terminals))
    node, cmap = emwc_to_nmwc(inst)
    ref_edge = reference_emwc(inst)
    ref_node = reference_node(node.graph, node.terminals, deletable=False)
    assert ref_edge == ref_node
    rep = solve_exact_nmwc(node)
    assert rep.optimum == ref_node
    # both mapping directions keep the size and validity
    back = node_cut_to_edge_cut(inst, cmap, rep.witness)
    assert back.weight <= rep.optimum and back.weight == ref_edge
    edge_opt = oracle_emwc(inst)
    fwd = edge_cut_to_node_cut(inst, node, cmap, edge_opt.witness)
    assert fwd.weight == edge_opt.optimum and verify_cut(node, fwd)


@given(edge_instances(max_vertices=7, max_edges=9, min_terminals=2))
def test_cliques_partition_terminal_edges(inst):
    assume(all(inst.graph.degree(t) > 0 for t in inst.terminals))
    node, cmap = emwc_to_nmwc(inst)
    adj = {frozenset((e.u, e.v)) for e in node.graph.edges}
    seen = set()
    for t, clique in cmap.cliques.items():
        assert len(clique) == inst.graph.degree(t)
        assert not seen & set(clique)
        seen |= set(clique)
        assert cmap.designated[t] == min(clique)
        assert all(frozenset((a, b)) in adj for a in clique for b in clique if a < b)
    assert set(node.terminals) == set(cmap.designated.values())
    terminal_edge_ids = {e for t in inst.terminals for e in cmap.subdivided.incident[t]}
    assert seen == terminal_edge_ids


@given(multigraphs(max_vertices=7, max_edges=9, connected=True), st.data())
def test_subcubic_in_subcubic_out(g, data):
    assume(g.edges and max(g.degree(v) for v in g.vertices) <= 3)
    ts = data.draw(st.lists(st.sampled_from(list(g.vertices)), min_size=2, max_size=4, unique=True))
    node, _ = emwc_to_nmwc(Instance(g, tuple(sorted(ts))))
    assert max(node.graph.degree(v) for v in node.graph.vertices) <= 3


@given(edge_instances(max_vertices=6, max_edges=7, min_terminals=2))
def test_line_graph_planar_for_planar_subcubic(inst):
    g = inst.graph
    assume(all(g.degree(t) > 0 for t in inst.terminals))
    assume(max(g.degree(v) for v in g.vertices) <= 3)
    node, _ = emwc_to_nmwc(inst)
    h = nx.Graph([(e.u, e.v) for e in g.edges])
    if nx.check_planarity(h)[0]:
        assert nx.check_planarity(nx.Graph([(e.u, e.v) for e in node.graph.edges]))[0]


# --- pendant reduction -------------------------------------------------------------------------


def test_pendant_edge_example():
    g = MultiGraph.build([0, 1], [(0, 0, 1)])
    dt = Instance(g, (0, 1), 1, NODE_DT)
    assert oracle_nmwc_dt(dt).optimum == 1
    out, pend = nmwcdt_to_nmwc(dt)
    assert oracle_nmwc(out).optimum == 1
    assert set(out.terminals) == set(pend.values()) and out.budget == 1


def test_pendant_no_terminals():
    dt = Instance(triangle(), (), 0, NODE_DT)
    out, pend = nmwcdt_to_nmwc(dt)
    assert pend == {} and len(out.graph.vertices) == 3 and len(out.graph.edges) == 3


@given(edge_instances(max_vertices=7, max_edges=9, min_terminals=0))
def test_pendant_optima_equal(e_inst):
    dt = Instance(e_inst.graph, e_inst.terminals, 0, NODE_DT)
    out, pend = nmwcdt_to_nmwc(dt)
    ref = reference_node(dt.graph, dt.terminals, deletable=True)
    assert reference_node(out.graph, out.terminals, deletable=False) == ref
    rep = solve_exact_nmwc(out)
    assert rep.optimum == ref
    back = pendant_cut_back(dt, rep.witness)
    assert back.weight == ref
    for v in dt.graph.vertices:
        bump = 1 if v in pend else 0
        assert out.graph.degree(v) == dt.graph.degree(v) + bump


# --- vertex cover --------------------------------------------------------------------------------


@pytest.mark.parametrize("g, opt", [
    (triangle(), 2),
    (MultiGraph.build([0, 1], [(0, 0, 1)]), 1),
    (MultiGraph.build([0, 1, 2], []), 0),
])
def test_vc_examples(g, opt):
    inst = vc_to_nmwcdt(g, opt)
    assert inst.kind == NODE_DT and inst.terminals == tuple(g.vertices)
    assert oracle_nmwc_dt(inst).optimum == opt == reference_vertex_cover(g)


def test_vc_rejects_parallel_edges():
    with pytest.raises(ReductionError, match="simple"):
        vc_to_nmwcdt(MultiGraph.build([0, 1], [(0, 0, 1), (1, 0, 1)]), 1)


@given(multigraphs(max_vertices=8, max_edges=12))
def test_vc_optimum_equals_deletable_cut(g):
    g = simple(g)
    inst = vc_to_nmwcdt(g, 0)
    ref = reference_vertex_cover(g)
    assert solve_exact_nmwc_dt(inst).optimum == ref
    # the pendant pipeline keeps subcubic inputs with terminal degree <= 2 subcubic
    if all(g.degree(v) <= 2 for v in g.vertices):
        out, _ = nmwcdt_to_nmwc(inst)
        assert max((out.graph.degree(v) for v in out.graph.vertices), default=0) <= 3


@pytest.mark.parametrize("entry", load_corpus(), ids=lambda e: e.name)
def test_formula_vertex_cover_matches_sat(entry):
    g, k = formula_vertex_cover(entry.formula)
    inst = vc_to_nmwcdt(g, k)
    opt = solve_exact_nmwc_dt(inst).optimum
    assert opt >= k
    assert (opt == k) == entry.sat


def test_formula_vertex_cover_unsat_by_hand():
    # unit clauses x1 and ~x1: a path C1.0 - x1 - ~x1 - C2.0, budget 1, cover 2
    f = Formula(1, ((1,), (-1,)))
    g, k = formula_vertex_cover(f)
    assert k == 1 and reference_vertex_cover(g) == 2 and brute_force_sat(f) is None


# --- subdivision ---------------------------------------------------------------------------------


def test_subdivision_examples():
    assert one_subdivision_preserves(Instance(triangle(), (0, 1, 2))).before == 3
    star = MultiGraph.build(range(4), [(i, 0, i + 1) for i in range(3)])
    v = one_subdivision_preserves(Instance(star, (1, 2, 3)))
    assert v.holds and v.before == v.after == 2
    v = one_subdivision_preserves(Instance(triangle(), (0,)))
    assert v.holds and v.before == 0


@given(edge_instances(max_vertices=6, max_edges=7, min_terminals=1))
def test_subdivision_preserves_against_reference(inst):
    v = one_subdivision_preserves(inst)
    assert v.holds and v.before == reference_emwc(inst)


def test_subdivision_rejects_weighted():
    g = MultiGraph.build([0, 1], [(0, 0, 1, 2)])
    with pytest.raises(ReductionError):
        one_subdivision_preserves(Instance(g, (0, 1)))


def test_generated_vc_pipeline_small():
    f = gen_formula(2, 2)
    g, k = formula_vertex_cover(f)
    assert len(g.vertices) == 2 * f.n + sum(len(c) for c in f.clauses)
    assert k == f.n + sum(len(c) - 1 for c in f.clauses)
    assert Fraction(reference_vertex_cover(g)) == solve_exact_nmwc_dt(vc_to_nmwcdt(g, k)).optimum
