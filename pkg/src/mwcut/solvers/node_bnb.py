"""Branch-and-bound for node multiway cut (terminals undeletable).

Terminal super-vertices absorb vertices that are decided to stay. Each node
drops non-terminals of degree <= 1, splices out degree-2 non-terminals that
sit next to another degree-2 non-terminal (every path through one passes the
other) and closes two-terminal components with one vertex-capacitated flow.
Bounds come from vertex-disjoint path counts and the certified distance LP.
Branching takes the first vertex of a shortest terminal-to-terminal path and
either deletes it or merges it into that terminal.

The deletable-terminal variant is solved through the pendant reduction.
"""

from __future__ import annotations

from collections import deque
from fractions import Fraction

from ..errors import GraphError, SizeGuardError
from ..graph import NODE, NODE_DT, CutSolution, Instance, verify_cut
from . import report as R
from .lp_bound import node_lower_bound
from .maxflow import min_cut
from .report import SolveReport


class _NState:
    __slots__ = ("adj", "term", "cut")

    def __init__(self, adj, term, cut):
        self.adj = adj  # vertex -> set of neighbours
        self.term = term  # set of terminal super-vertices
        self.cut = cut  # deleted original vertices

    def copy(self) -> _NState:
        return _NState({v: set(nb) for v, nb in self.adj.items()}, set(self.term), list(self.cut))

    def restrict(self, comp) -> _NState:
        return _NState({v: set(self.adj[v]) for v in comp}, {v for v in comp if v in self.term}, [])

    def remove(self, v):
        for u in self.adj.pop(v):
            self.adj[u].discard(v)
        self.term.discard(v)

    def delete(self, v):
        self.remove(v)
        self.cut.append(v)

    def merge(self, t, v) -> bool:
        """Keep v and fold it into terminal t; False if that joins two terminals."""
        nb = self.adj[v] - {t}
        if any(u in self.term for u in nb):
            return False
        self.remove(v)
        for u in nb:
            self.adj[u].add(t)
            self.adj[t].add(u)
        return True

    def components(self):
        seen = set()
        out = []
        for s in sorted(self.adj):
            if s in seen:
                continue
            seen.add(s)
            comp = [s]
            q = deque([s])
            while q:
                x = q.popleft()
                for y in self.adj[x]:
                    if y not in seen:
                        seen.add(y)
                        comp.append(y)
                        q.append(y)
            out.append(comp)
        return out


def _split_flow(st: _NState, comp, sources, sinks):
    """Minimum vertex cut between terminal sets inside comp; returns (value, cut vertices)."""
    inf = len(comp) + 1
    adj: dict = {}
    for v in comp:
        cap = inf if v in st.term else 1
        adj.setdefault((v, 0), {})[(v, 1)] = cap
        adj.setdefault((v, 1), {})
        adj[(v, 1)].setdefault((v, 0), 0)
        for u in st.adj[v]:
            adj[(v, 1)][(u, 0)] = inf
            adj.setdefault((u, 0), {}).setdefault((v, 1), 0)
    r = min_cut(adj, [(s, 0) for s in sources], [(t, 1) for t in sinks])
    cut = [v for v in comp if (v, 0) in r.near_side and (v, 1) not in r.near_side]
    return r.value, cut


def _reduce(st: _NState):
    """Reductions in place; None if infeasible, else [(component, lower bound)]."""
    while True:
        changed = False
        for t in st.term:
            if st.adj[t] & st.term:
                return None
        work = [v for v in st.adj if v not in st.term and len(st.adj[v]) <= 1]
        while work:
            v = work.pop()
            if v not in st.adj or v in st.term or len(st.adj[v]) > 1:
                continue
            nb = list(st.adj[v])
            st.remove(v)
            changed = True
            work += [u for u in nb if u not in st.term and len(st.adj[u]) <= 1]
        for v in sorted(st.adj):
            if v not in st.adj or v in st.term or len(st.adj[v]) != 2:
                continue
            a, b = sorted(st.adj[v])
            for keep, other in ((a, b), (b, a)):
                if keep not in st.term and len(st.adj[keep]) == 2:
                    # every terminal path through v also passes keep: v is never needed
                    st.remove(v)
                    st.adj[keep].add(other)
                    st.adj[other].add(keep)
                    changed = True
                    break
        out = []
        for comp in st.components():
            terms = [v for v in comp if v in st.term]
            if len(terms) <= 1:
                for v in comp:
                    st.remove(v)
                changed = True
            elif len(terms) == 2:
                _, cut = _split_flow(st, comp, [terms[0]], [terms[1]])
                for v in cut:
                    st.cut.append(v)
                for v in comp:
                    st.remove(v)
                changed = True
            else:
                out.append((comp, terms))
        if changed:
            continue
        return [(comp, _flow_bound(st, comp, terms)) for comp, terms in out]


def _flow_bound(st: _NState, comp, terms) -> int:
    """Largest pairwise minimum vertex cut from the first terminal; a cheap valid bound."""
    best = 0
    for t in terms[1:]:
        v, _ = _split_flow(st, comp, [terms[0]], [t])
        best = max(best, v)
    return best


def _branch_vertex(st: _NState, comp, terms):
    origin = {t: t for t in terms}
    parent = {}
    dist = {t: 0 for t in terms}
    q = deque(sorted(terms))
    best = None
    while q:
        x = q.popleft()
        for y in sorted(st.adj[x]):
            if y not in origin:
                origin[y] = origin[x]
                parent[y] = x
                dist[y] = dist[x] + 1
                q.append(y)
            elif origin[y] != origin[x]:
                cand = (dist[x] + dist[y], min(x, y), max(x, y))
                if best is None or cand < best:
                    best = cand
    _, x, y = best
    end = x if x not in st.term else y
    while parent[end] not in st.term:
        end = parent[end]
    return parent[end], end


class _Stats:
    def __init__(self, max_nodes, lp, budget):
        self.nodes = 0
        self.max_nodes = max_nodes
        self.lp = lp
        self.budget = budget
        self.trace = []

    def visit(self, depth, lb, status):
        self.nodes += 1
        if self.nodes > self.max_nodes:
            raise SizeGuardError(f"node branch-and-bound exceeded {self.max_nodes} nodes")
        if len(self.trace) < 100_000:
            self.trace.append((depth, lb, status))


def _solve(st: _NState, limit: int, stats: _Stats, depth: int = 0, offset: int = 0):
    """Smallest completion within limit; the trace records offset + local bound, as in the edge solver."""
    st = st.copy()
    bounds = _reduce(st)
    if bounds is None:
        stats.visit(depth, None, "infeasible")
        return None
    cost = len(st.cut)
    lb = cost + sum(b for _, b in bounds)
    if lb <= limit and stats.lp and bounds:
        bounds = [(c, max(b, node_lower_bound({v: st.adj[v] for v in c}, [v for v in c if v in st.term])))
                  for c, b in bounds]
        lb = cost + sum(b for _, b in bounds)
    if lb > limit:
        stats.visit(depth, offset + lb, "pruned" if offset + lb > stats.budget else "dominated")
        return None
    if not bounds:
        stats.visit(depth, offset + lb, "leaf")
        return st
    if len(bounds) > 1:
        stats.visit(depth, offset + lb, "split")
        rest = lb - cost
        for comp, b in bounds:
            rest -= b
            sub = _solve(st.restrict(comp), limit - len(st.cut) - rest, stats, depth + 1, offset + len(st.cut) + rest)
            if sub is None:
                return None
            st.cut += sub.cut
        for comp, _ in bounds:
            for v in comp:
                if v in st.adj:
                    st.remove(v)
        return st
    stats.visit(depth, offset + lb, "branch")
    comp, _ = bounds[0]
    t, x = _branch_vertex(st, comp, [v for v in comp if v in st.term])
    best = None
    keep = st.copy()
    if keep.merge(t, x):
        best = _solve(keep, limit, stats, depth + 1, offset)
        if best is not None:
            limit = len(best.cut) - 1
    drop = st.copy()
    drop.delete(x)
    if len(drop.cut) <= limit:
        alt = _solve(drop, limit, stats, depth + 1, offset)
        if alt is not None:
            best = alt
    return best


def _state(inst: Instance) -> _NState:
    adj = {v: set() for v in inst.graph.vertices}
    for e in inst.graph.edges:
        adj[e.u].add(e.v)
        adj[e.v].add(e.u)
    return _NState(adj, set(inst.terminals), [])


def bnb_nmwc(inst: Instance, budget, lp: bool = True, max_nodes: int | None = None) -> SolveReport:
    """Smallest node multiway cut (terminals undeletable) of size <= budget."""
    if inst.kind != NODE:
        raise GraphError("bnb_nmwc needs a node instance")
    budget = Fraction(budget)
    limit = int(budget // 1)
    stats = _Stats(max_nodes or R.BNB_MAX_NODES, lp, limit)
    st = _state(inst)
    res = _solve(st, limit, stats)
    rep = SolveReport(None, None, stats.nodes, [(d, None if lb is None else Fraction(lb), s) for d, lb, s in stats.trace],
                      method="node-bnb+lp" if lp else "node-bnb", budget=budget)
    if res is not None:
        wit = CutSolution.of_vertices(inst.graph, res.cut)
        if len(res.cut) != len(set(res.cut)) or not verify_cut(inst, wit):
            raise AssertionError("node branch-and-bound produced an invalid witness")
        rep.optimum = wit.weight
        rep.witness = wit
    return rep


def solve_exact_nmwc(inst: Instance, lp: bool = True, max_nodes: int | None = None) -> SolveReport:
    """Optimum by ascending budget search; ``optimum`` None when no node cut exists."""
    if inst.kind != NODE:
        raise GraphError("solve_exact_nmwc needs a node instance")
    st = _state(inst)
    if _reduce(st.copy()) is None:
        return SolveReport(None, None, 1, [], method="node-bnb")
    free = len(inst.graph.vertices) - len(inst.terminals)
    st = _state(inst)
    bounds = _reduce(st)
    k = len(st.cut) + sum(b for _, b in bounds)
    nodes = 0
    trace: list = []
    while True:
        r = bnb_nmwc(inst, k, lp=lp, max_nodes=max_nodes)
        nodes += r.nodes_explored
        trace += r.bound_trace
        if r.feasible:
            break
        if k >= free:
            return SolveReport(None, None, nodes, trace, method=r.method)
        k += 1
    return SolveReport(r.optimum, CutSolution.of_vertices(inst.graph, r.witness.sorted_items()), nodes, trace,
                       method=r.method)


def solve_exact_nmwc_dt(inst: Instance, lp: bool = True, max_nodes: int | None = None) -> SolveReport:
    """Deletable-terminal optimum via the pendant reduction."""
    from ..node_reductions import nmwcdt_to_nmwc, pendant_cut_back

    if inst.kind != NODE_DT:
        raise GraphError("solve_exact_nmwc_dt needs a node-deletable instance")
    if len(inst.terminals) <= 1:
        return SolveReport(Fraction(0), CutSolution.of_vertices(inst.graph, ()), method="node-bnb")
    p, _ = nmwcdt_to_nmwc(inst)
    r = solve_exact_nmwc(p, lp=lp, max_nodes=max_nodes)
    wit = pendant_cut_back(inst, r.witness)
    return SolveReport(r.optimum, wit, r.nodes_explored, r.bound_trace, method=r.method + "+pendant")
