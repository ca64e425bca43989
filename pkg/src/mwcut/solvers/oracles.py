"""Exhaustive ground-truth solvers for micro instances.

Two independent edge oracles (edge-subset search and terminal labelling) and
a vertex-subset oracle for both node variants. None of them share code with
the branch-and-bound solver.
"""

from __future__ import annotations

import itertools
import warnings
from fractions import Fraction
from math import comb

from ..errors import GraphError, SizeGuardError
from ..graph import EDGE, NODE, NODE_DT, CutSolution, Instance, MultiGraph
from . import report as R
from .report import SolveReport


def _guard(ok: bool, msg: str, force: bool):
    if ok:
        return
    if R.forced(force):
        warnings.warn(f"size guard overridden: {msg}", stacklevel=3)
        return
    raise SizeGuardError(msg)


class _Separation:
    """Union-find based test: do the kept edges connect two terminals?"""

    def __init__(self, g: MultiGraph, terminals):
        self.idx = {v: i for i, v in enumerate(g.vertices)}
        self.ends = [(self.idx[e.u], self.idx[e.v]) for e in g.edges]
        self.term = [self.idx[t] for t in terminals]
        self.n = len(g.vertices)

    def separates(self, removed: set[int] | list[bool]) -> bool:
        parent = list(range(self.n))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for i, (a, b) in enumerate(self.ends):
            if removed[i]:
                continue
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[ra] = rb
        roots = set()
        for t in self.term:
            r = find(t)
            if r in roots:
                return False
            roots.add(r)
        return True


def emwc_subsets(inst: Instance, all_optima: bool = False, force: bool = False):
    """Exhaustive edge-subset search; returns (optimum, [optimal index sets])."""
    g = inst.graph
    _guard(len(g.edges) <= R.SUBSET_MAX_EDGES,
           f"subset oracle needs |E| <= {R.SUBSET_MAX_EDGES}, got {len(g.edges)}", force)
    sep = _Separation(g, inst.terminals)
    ws = [e.w for e in g.edges]
    m = len(ws)
    best = [sum(ws, Fraction(0))]
    found: list[frozenset[int]] = []
    removed = [False] * m

    def rec(i: int, weight: Fraction):
        if weight > best[0] or (not all_optima and weight == best[0] and found):
            return
        if sep.separates(removed):
            if weight < best[0]:
                best[0] = weight
                found.clear()
            found.append(frozenset(j for j in range(m) if removed[j]))
            return
        if i == m:
            return
        # early separation pruning: even deleting every remaining edge must separate
        tail = removed[i:]
        removed[i:] = [True] * (m - i)
        possible = sep.separates(removed)
        removed[i:] = tail
        if not possible:
            return
        removed[i] = True
        rec(i + 1, weight + ws[i])
        removed[i] = False
        rec(i + 1, weight)

    rec(0, Fraction(0))
    ids = [e.id for e in g.edges]
    return best[0], sorted({frozenset(ids[j] for j in s) for s in found}, key=sorted)


def _eliminate_series(free: set, edges: list[tuple[int, int, int, Fraction]]):
    """Drop free vertices of degree 2: the pair of edges acts as one edge of the lighter weight.

    Exact for the optimum value (not for the set of optima). Merged edges keep the
    id of the lighter original (ties: smaller id), so cuts map back to edge ids.
    """
    edges = list(edges)
    changed = True
    while changed:
        changed = False
        inc: dict[int, list[int]] = {}
        for i, (_, a, b, _) in enumerate(edges):
            inc.setdefault(a, []).append(i)
            inc.setdefault(b, []).append(i)
        for v in sorted(free):
            idx = inc.get(v, [])
            if len(idx) != 2:
                continue
            (e1, e2) = (edges[idx[0]], edges[idx[1]])
            u = e1[2] if e1[1] == v else e1[1]
            w = e2[2] if e2[1] == v else e2[1]
            keep = [e for j, e in enumerate(edges) if j not in idx]
            if u != w:
                light = min(e1, e2, key=lambda e: (e[3], e[0]))
                keep.append((light[0], u, w, light[3]))
            edges = keep
            free.discard(v)
            changed = True
            break
    return free, edges


def emwc_labelings(inst: Instance, all_optima: bool = False, force: bool = False, series: bool = False):
    """Minimum bichromatic weight over labellings of non-terminals by terminals.

    ``series`` first eliminates degree-2 non-terminals (optimum value only).
    """
    g = inst.graph
    ts = list(inst.terminals)
    tset = set(ts)
    free_set = {v for v in g.vertices if v not in tset}
    edge_list = [(e.id, e.u, e.v, e.w) for e in g.edges]
    if series and not all_optima:
        free_set, edge_list = _eliminate_series(free_set, edge_list)
    free = [v for v in g.vertices if v in free_set]
    _guard(len(free) <= R.LABELING_MAX_FREE_VERTICES,
           f"labelling oracle needs |V \\ T| <= {R.LABELING_MAX_FREE_VERTICES}, got {len(free)}", force)
    if len(ts) <= 1:
        return Fraction(0), [frozenset()]
    nbrs: dict[int, set] = {v: set() for v in g.vertices}
    for _, a, b, _ in edge_list:
        nbrs[a].add(b)
        nbrs[b].add(a)
    # order free vertices by BFS distance from the terminals so partial costs bite early
    order = []
    seen = set(ts)
    frontier = list(ts)
    while frontier:
        nxt = []
        for x in frontier:
            for y in sorted(nbrs[x]):
                if y not in seen and y in free_set:
                    seen.add(y)
                    order.append(y)
                    nxt.append(y)
        frontier = nxt
    order += [v for v in free if v not in seen]
    label = {t: i for i, t in enumerate(ts)}
    pos = {v: i for i, v in enumerate(order)}
    # edges charged when their later endpoint (in assignment order) is labelled
    back: dict[int, list[tuple[int, Fraction, int]]] = {v: [] for v in order}
    fixed_cost = Fraction(0)
    fixed_cut = []
    for eid, a, b, w in edge_list:
        if a in tset and b in tset:
            fixed_cost += w
            fixed_cut.append(eid)
            continue
        if a in tset or (b not in tset and pos[a] < pos[b]):
            back[b].append((a, w, eid))
        else:
            back[a].append((b, w, eid))
    best = [fixed_cost + sum((w for *_, w in edge_list), Fraction(0)) + 1]
    found: set[frozenset[int]] = set()
    k = len(ts)

    def rec(i: int, cost: Fraction):
        if cost > best[0] or (not all_optima and cost == best[0]):
            return
        if i == len(order):
            cut = frozenset(fixed_cut) | frozenset(
                eid for v in order for (u, _, eid) in back[v] if label[u] != label[v])
            if cost < best[0]:
                best[0] = cost
                found.clear()
            found.add(cut)
            return
        v = order[i]
        for c in range(k):
            label[v] = c
            extra = sum((w for (u, w, _) in back[v] if label[u] != c), Fraction(0))
            rec(i + 1, cost + extra)
        del label[v]

    rec(0, fixed_cost)
    return best[0], sorted(found, key=sorted)


def oracle_emwc(inst: Instance, method: str = "both", force: bool = False, series: bool = False) -> SolveReport:
    """Edge multiway cut optimum by exhaustive search; ``both`` cross-checks the two methods.

    ``series`` lets the labelling method eliminate degree-2 non-terminals first.
    """
    if inst.kind != EDGE:
        raise GraphError("oracle_emwc needs an edge instance")
    results = {}
    if len(inst.terminals) <= 1:
        results["trivial"] = (Fraction(0), [frozenset()])
    else:
        g = inst.graph
        free = len(g.vertices) - len(inst.terminals)
        if series:
            tset = set(inst.terminals)
            free = len(_eliminate_series({v for v in g.vertices if v not in tset},
                                         [(e.id, e.u, e.v, e.w) for e in g.edges])[0])
        use_subset = method in ("both", "subset") and (len(g.edges) <= R.SUBSET_MAX_EDGES or method == "subset")
        use_label = method in ("both", "labeling") and (free <= R.LABELING_MAX_FREE_VERTICES or method == "labeling")
        if not (use_subset or use_label):
            _guard(False, f"instance exceeds both oracle guards (|E|={len(g.edges)}, |V\\T|={free})", force)
            use_subset = True
        if use_subset:
            results["subset"] = emwc_subsets(inst, force=force)
        if use_label:
            results["labeling"] = emwc_labelings(inst, force=force, series=series)
    values = {v for v, _ in results.values()}
    if len(values) != 1:
        raise AssertionError(f"oracle methods disagree: { {k: str(v) for k, (v, _) in results.items()} }")
    name, (opt, cuts) = next(iter(results.items()))
    wit = CutSolution.of_edges(inst.graph, cuts[0])
    return SolveReport(opt, wit, method="oracle:" + "+".join(results))


def oracle_emwc_all_optima(inst: Instance, method: str = "both", force: bool = False) -> set[frozenset[int]]:
    """Every minimum edge multiway cut, as edge-id sets."""
    if len(inst.terminals) <= 1:
        return {frozenset()}
    out = {}
    g = inst.graph
    free = len(g.vertices) - len(inst.terminals)
    if method in ("both", "subset") and (len(g.edges) <= R.SUBSET_MAX_EDGES or method == "subset"):
        out["subset"] = emwc_subsets(inst, all_optima=True, force=force)
    if method in ("both", "labeling") and (free <= R.LABELING_MAX_FREE_VERTICES or method == "labeling"):
        out["labeling"] = emwc_labelings(inst, all_optima=True, force=force)
    if not out:
        _guard(False, "instance exceeds both oracle guards", force)
        out["subset"] = emwc_subsets(inst, all_optima=True, force=True)
    sets = [frozenset(c) for c in next(iter(out.values()))[1]]
    for v, cuts in out.values():
        if set(cuts) != set(sets):
            raise AssertionError("oracle methods disagree on the set of optima")
    return set(sets)


def _node_search(inst: Instance, deletable: bool, all_optima: bool, force: bool):
    g = inst.graph
    ts = list(inst.terminals)
    tset = set(ts)
    cand = list(g.vertices) if deletable else [v for v in g.vertices if v not in tset]
    adj = {v: [] for v in g.vertices}
    for e in g.edges:
        adj[e.u].append(e.v)
        adj[e.v].append(e.u)

    def separates(removed: set) -> bool:
        owner = {}
        for t in ts:
            if t in removed:
                continue
            if t in owner:
                return False
            owner[t] = t
            stack = [t]
            while stack:
                x = stack.pop()
                for y in adj[x]:
                    if y in removed:
                        continue
                    o = owner.get(y)
                    if o is None:
                        owner[y] = t
                        stack.append(y)
                    elif o != t:
                        return False
        return True

    if not separates(set(cand)):
        return None, []
    if all_optima:
        _guard(len(cand) <= R.NODE_ALL_OPTIMA_MAX_CANDIDATES,
               f"all-optima node oracle needs <= {R.NODE_ALL_OPTIMA_MAX_CANDIDATES} candidates", force)
    examined = 0
    for size in range(len(cand) + 1):
        examined += comb(len(cand), size)
        _guard(examined <= R.NODE_MAX_SUBSETS,
               f"node oracle would examine more than {R.NODE_MAX_SUBSETS} subsets", force)
        found = (frozenset(s) for s in itertools.combinations(cand, size) if separates(set(s)))
        hits = list(found) if all_optima else list(itertools.islice(found, 1))
        if hits:
            return size, hits
    raise AssertionError("unreachable: full candidate set separates")


def oracle_nmwc(inst: Instance, all_optima: bool = False, force: bool = False):
    """Minimum node multiway cut avoiding terminals. Returns SolveReport (or all optima)."""
    if inst.kind != NODE:
        raise GraphError("oracle_nmwc needs a node instance")
    return _node_report(inst, False, all_optima, force)


def oracle_nmwc_dt(inst: Instance, all_optima: bool = False, force: bool = False):
    """Minimum node multiway cut that may delete terminals."""
    if inst.kind != NODE_DT:
        raise GraphError("oracle_nmwc_dt needs a node-deletable instance")
    return _node_report(inst, True, all_optima, force)


def _node_report(inst, deletable, all_optima, force):
    opt, sets = _node_search(inst, deletable, all_optima, force)
    if all_optima:
        return set(sets)
    if opt is None:
        return SolveReport(None, None, method="oracle:node-subsets")
    return SolveReport(Fraction(opt), CutSolution.of_vertices(inst.graph, sets[0]), method="oracle:node-subsets")
