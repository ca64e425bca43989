import itertools
from fractions import Fraction

import networkx as nx
import pytest
from hypothesis import assume, given

from mwcut.errors import GraphError, SizeGuardError, UnknownIdError
from mwcut.formula import Formula
from mwcut.gadgets import compile_weighted
from mwcut.graph import EDGE, NODE, NODE_DT, CutSolution, Instance, MultiGraph, expand_parallel, verify_cut
from mwcut.node_reductions import emwc_to_nmwc
from mwcut.solvers.bnb import bnb_emwc, enumerate_min_cuts, root_lower_bound, solve_exact_emwc
from mwcut.solvers.lp_bound import ckr_lower_bound, node_lower_bound
from mwcut.solvers.maxflow import graph_capacities, max_flow_min_cut, min_cut
from mwcut.solvers.node_bnb import bnb_nmwc, solve_exact_nmwc, solve_exact_nmwc_dt
from mwcut.solvers.node_milp import MILP_METHOD, milp_nmwc
from mwcut.solvers.oracles import (
    emwc_labelings, emwc_subsets, oracle_emwc, oracle_emwc_all_optima, oracle_nmwc, oracle_nmwc_dt,
)

from strategies import edge_instances, nx_separates, reference_emwc, reference_node

CORPUS_F = Formula(2, ((1, 2), (1, 2), (-1, -2)))


def triangle(w=1):
    return MultiGraph.build([0, 1, 2], [(0, 0, 1, w), (1, 1, 2, w), (2, 0, 2, w)])


def claw():
    return MultiGraph.build(range(4), [(i, 0, i + 1) for i in range(3)])


def audit_trace(rep):
    for _, lb, status in rep.bound_trace:
        if status == "pruned":
            assert lb is not None and lb > rep.budget


@pytest.fixture(scope="module")
def compiled():
    return compile_weighted(CORPUS_F)


# --- max flow ------------------------------------------------------------------------------


def test_single_edge_weight_3():
    g = MultiGraph.build([0, 1], [(0, 0, 1, 3)])
    assert max_flow_min_cut(g, 0, 1) == (3, frozenset({0}))


def test_two_disjoint_paths():
    g = MultiGraph.build(range(4), [(0, 0, 1, 1), (1, 1, 3, 5), (2, 0, 2, 4), (3, 2, 3, 2)])
    value, cut = max_flow_min_cut(g, 0, 3)
    assert value == 3
    # enumerate all s-t cuts by source side
    best = min(sum(e.w for e in g.edges if (e.u in side) != (e.v in side))
               for r in range(3) for extra in itertools.combinations([1, 2], r) for side in [{0, *extra}])
    assert value == best and sum(g.edge(i).w for i in cut) == 3


def test_disconnected():
    g = MultiGraph.build([0, 1, 2], [(0, 0, 2)])
    assert max_flow_min_cut(g, 0, 1) == (0, frozenset())


def test_bad_endpoints():
    g = MultiGraph.build([0, 1], [(0, 0, 1)])
    with pytest.raises(UnknownIdError):
        max_flow_min_cut(g, 0, 5)
    with pytest.raises(GraphError):
        max_flow_min_cut(g, 0, 0)


@given(edge_instances(max_vertices=8, max_edges=14, weights=(1, 2, 3, Fraction(1, 2)), min_terminals=2,
                      max_terminals=2))
def test_max_flow_matches_networkx_and_duality(inst):
    g = inst.graph
    s, t = inst.terminals
    value, cut = max_flow_min_cut(g, s, t)
    h = nx.Graph()
    h.add_nodes_from(g.vertices)
    for e in g.edges:
        prev = h.get_edge_data(e.u, e.v, {"capacity": 0})["capacity"]
        h.add_edge(e.u, e.v, capacity=prev + e.w)
    ref, _ = nx.minimum_cut(h, s, t)
    assert value == ref
    assert sum((g.edge(i).w for i in cut), Fraction(0)) == value
    assert nx_separates(g, [s, t], removed_edges=cut)
    r = min_cut(graph_capacities(g), [s], [t])
    assert t not in r.near_side
    # conservation at every inner vertex
    for v in g.vertices:
        if v not in (s, t):
            assert sum(r.flow(v, u) for u in graph_capacities(g)[v]) == 0


# --- oracles ----------------------------------------------------------------------------------


def test_oracle_examples():
    assert oracle_emwc(Instance(triangle(), (0, 1, 2))).optimum == 3
    assert oracle_emwc(Instance(claw(), (1, 2, 3))).optimum == 2
    assert oracle_emwc(Instance(claw(), (1,))).optimum == 0


def test_oracle_all_optima_claw():
    opts = oracle_emwc_all_optima(Instance(claw(), (1, 2, 3)))
    assert opts == {frozenset(p) for p in itertools.combinations(range(3), 2)}


def test_node_oracle_examples():
    path = MultiGraph.build([0, 1, 2], [(0, 0, 1), (1, 1, 2)])
    assert oracle_nmwc(Instance(path, (0, 2), 0, NODE)).optimum == 1
    assert oracle_nmwc_dt(Instance(path, (0, 2), 0, NODE_DT)).optimum == 1
    edge = MultiGraph.build([0, 1], [(0, 0, 1)])
    assert oracle_nmwc(Instance(edge, (0, 1), 0, NODE)).optimum is None
    assert oracle_nmwc_dt(Instance(edge, (0, 1), 0, NODE_DT)).optimum == 1
    assert oracle_nmwc_dt(Instance(triangle(), (0, 1, 2), 0, NODE_DT)).optimum == 2


def test_oracle_guard():
    g = MultiGraph.build(range(30), [(i, i, i + 1) for i in range(29)])
    with pytest.raises(SizeGuardError):
        oracle_emwc(Instance(g, (0, 29)))


@given(edge_instances(max_vertices=7, max_edges=10, weights=(1, 2, 3), min_terminals=2))
def test_subset_and_labelling_agree_with_reference(inst):
    a, _ = emwc_subsets(inst)
    b, _ = emwc_labelings(inst)
    assert a == b == reference_emwc(inst)
    assert set(emwc_subsets(inst, all_optima=True)[1]) == set(emwc_labelings(inst, all_optima=True)[1])


@given(edge_instances(max_vertices=7, max_edges=9, min_terminals=1))
def test_node_oracles_against_reference(e):
    n = Instance(e.graph, e.terminals, 0, NODE)
    d = Instance(e.graph, e.terminals, 0, NODE_DT)
    assert oracle_nmwc(n).optimum == reference_node(e.graph, e.terminals, deletable=False)
    assert oracle_nmwc_dt(d).optimum == reference_node(e.graph, e.terminals, deletable=True)


# --- branch and bound -------------------------------------------------------------------------


def test_compiled_budget_20_and_19(compiled):
    inst, _ = compiled
    yes = bnb_emwc(inst, 20)
    assert yes.optimum == 20 and verify_cut(inst, yes.witness)
    no = bnb_emwc(inst, 19)
    assert no.optimum is None
    audit_trace(yes)
    audit_trace(no)


def test_compiled_exact(compiled):
    inst, _ = compiled
    rep = solve_exact_emwc(inst, trace=True)
    assert rep.optimum == 20
    assert rep.witness.items == frozenset(rep.witness.sorted_items())


@given(edge_instances(max_vertices=8, max_edges=14, weights=(1, 2, 3), min_terminals=2))
def test_bnb_matches_oracle(inst):
    ref = oracle_emwc(inst).optimum
    rep = solve_exact_emwc(inst, trace=True)
    assert rep.optimum == ref
    assert verify_cut(inst, rep.witness) and rep.witness.weight == ref
    assert bnb_emwc(inst, ref).optimum == ref
    if ref > 0:
        below = bnb_emwc(inst, ref - Fraction(1, 2))
        assert below.optimum is None
        audit_trace(below)


@given(edge_instances(max_vertices=8, max_edges=14, weights=(1, 2), min_terminals=2))
def test_bnb_without_lp_matches_oracle(inst):
    assert solve_exact_emwc(inst, lp=False).optimum == oracle_emwc(inst).optimum


@given(edge_instances(max_vertices=8, max_edges=14, weights=(1, 2, 3), min_terminals=2, max_terminals=2))
def test_two_terminals_equal_max_flow(inst):
    s, t = inst.terminals
    assert solve_exact_emwc(inst).optimum == max_flow_min_cut(inst.graph, s, t)[0]


def test_single_terminal_zero():
    rep = solve_exact_emwc(Instance(triangle(), (0,)))
    assert rep.optimum == 0 and rep.witness.items == frozenset()


def test_fractional_weights_scaled():
    inst = Instance(triangle(Fraction(1, 3)), (0, 1, 2))
    assert solve_exact_emwc(inst).optimum == 1


@given(edge_instances(max_vertices=8, max_edges=14, weights=(1, 2, 3), min_terminals=2))
def test_lower_bounds_valid(inst):
    opt = oracle_emwc(inst).optimum
    assert root_lower_bound(inst) <= opt
    assert root_lower_bound(inst, lp=True) <= opt
    assert ckr_lower_bound(graph_capacities(inst.graph), list(inst.terminals)) <= opt


@given(edge_instances(max_vertices=7, max_edges=10, weights=(1, 2), min_terminals=2))
def test_enumeration_matches_oracle(inst):
    opt, cuts = enumerate_min_cuts(inst)
    assert opt == oracle_emwc(inst).optimum
    assert cuts == oracle_emwc_all_optima(inst)


def test_enumeration_on_compiled(compiled):
    inst, _ = compiled
    opt, cuts = enumerate_min_cuts(inst)
    assert opt == 20 and cuts
    assert all(verify_cut(inst, CutSolution.of_edges(inst.graph, c)) for c in cuts)


# --- node solvers ----------------------------------------------------------------------------


@given(edge_instances(max_vertices=8, max_edges=11, min_terminals=1))
def test_node_bnb_matches_oracles(e):
    n = Instance(e.graph, e.terminals, 0, NODE)
    d = Instance(e.graph, e.terminals, 0, NODE_DT)
    ref = oracle_nmwc(n).optimum
    rep = solve_exact_nmwc(n)
    assert rep.optimum == ref
    if ref is not None:
        assert verify_cut(n, rep.witness)
        assert bnb_nmwc(n, ref).optimum == ref
    assert solve_exact_nmwc_dt(d).optimum == oracle_nmwc_dt(d).optimum


@given(edge_instances(max_vertices=8, max_edges=11, min_terminals=2))
def test_node_lower_bound_valid(e):
    n = Instance(e.graph, e.terminals, 0, NODE)
    ref = oracle_nmwc(n).optimum
    assume(ref is not None)
    adj = {v: set() for v in e.graph.vertices}
    for x in e.graph.edges:
        adj[x.u].add(x.v)
        adj[x.v].add(x.u)
    assert node_lower_bound(adj, list(e.terminals)) <= ref


@given(edge_instances(max_vertices=7, max_edges=9, min_terminals=2))
def test_milp_matches_node_oracle(e):
    n = Instance(e.graph, e.terminals, 0, NODE)
    ref = oracle_nmwc(n).optimum
    rep = milp_nmwc(n)
    assert rep.optimum == ref and rep.method == MILP_METHOD
    if ref is not None:
        assert verify_cut(n, rep.witness)


def test_milp_on_line_graph_of_compiled_n2():
    inst, _ = compile_weighted(CORPUS_F)
    unit = Instance(expand_parallel(inst.graph), inst.terminals, inst.budget, EDGE)
    node, _ = emwc_to_nmwc(unit)
    rep = milp_nmwc(node, time_limit=300)
    assert rep.optimum == 20 and verify_cut(node, rep.witness)
