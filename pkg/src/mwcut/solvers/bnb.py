"""Branch-and-bound for (weighted) edge multiway cut.

The search works on a contracted copy of the graph: super-vertices joined by
integer-weighted super-edges that remember the original edge ids they carry.
Every node first applies exact reductions:

* non-terminal vertices of degree <= 1 are dropped;
* components holding at most one terminal are dropped, components holding two
  are closed with one maximum flow;
* (optimisation only) a non-terminal edge carrying at least half of its
  endpoint's weight is contracted, and every terminal absorbs the far side of
  its minimum isolating cut. Both keep at least one optimum intact.

The lower bound of a component is the ceiling of half the sum of its
terminals' isolating cuts; a pairwise minimum cut between two terminals never
exceeds this, so it is not computed separately. Independent components are
solved separately and their optima added. Branching takes the first edge of a
shortest terminal-to-terminal path and either cuts it or contracts it into
the terminal.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from fractions import Fraction

from ..errors import GraphError, SizeGuardError
from ..graph import EDGE, CutSolution, Instance, verify_cut
from . import report as R
from .lp_bound import ckr_lower_bound
from .maxflow import min_cut
from .report import SolveReport


def _key(a, b):
    return (a, b) if a < b else (b, a)


class _State:
    __slots__ = ("adj", "ids", "term", "cut", "cost")

    def __init__(self, adj, ids, term, cut, cost):
        self.adj = adj
        self.ids = ids
        self.term = term
        self.cut = cut
        self.cost = cost

    def copy(self) -> _State:
        return _State({u: dict(nb) for u, nb in self.adj.items()}, dict(self.ids), dict(self.term),
                      list(self.cut), self.cost)

    def restrict(self, comp) -> _State:
        adj = {u: dict(self.adj[u]) for u in comp}
        ids = {k: v for k, v in self.ids.items() if k[0] in adj}
        term = {u: t for u, t in self.term.items() if u in adj}
        return _State(adj, ids, term, [], 0)

    def contract(self, a, b) -> bool:
        """Merge super-vertex b into a (the edge between them is kept, not cut)."""
        if b in self.term:
            if a in self.term:
                return False
            self.term[a] = self.term.pop(b)
        adj = self.adj
        nb_b = adj.pop(b)
        if b in adj[a]:
            del adj[a][b]
            del self.ids[_key(a, b)]
        for c, w in nb_b.items():
            if c == a:
                continue
            del adj[c][b]
            moved = self.ids.pop(_key(b, c))
            if c in adj[a]:
                adj[a][c] += w
                adj[c][a] += w
                k = _key(a, c)
                self.ids[k] = self.ids[k] + moved
            else:
                adj[a][c] = w
                adj[c][a] = w
                self.ids[_key(a, c)] = moved
        return True

    def cut_edge(self, a, b):
        w = self.adj[a].pop(b)
        del self.adj[b][a]
        self.cost += w
        self.cut.append(self.ids.pop(_key(a, b)))

    def drop_vertex(self, v):
        for c in self.adj.pop(v):
            del self.adj[c][v]
            del self.ids[_key(v, c)]
        self.term.pop(v, None)

    def components(self):
        seen = set()
        out = []
        for s in sorted(self.adj):
            if s in seen:
                continue
            seen.add(s)
            comp = [s]
            queue = deque([s])
            while queue:
                x = queue.popleft()
                for y in self.adj[x]:
                    if y not in seen:
                        seen.add(y)
                        comp.append(y)
                        queue.append(y)
            out.append(comp)
        return out

    def cut_ids(self) -> list[int]:
        return [i for part in self.cut for i in part]


def _initial_state(inst: Instance) -> tuple[_State, int]:
    g = inst.graph
    scale = 1
    for e in g.edges:
        scale = math.lcm(scale, e.w.denominator)
    adj = {v: {} for v in g.vertices}
    ids = {}
    for e in g.edges:
        w = int(e.w * scale)
        k = _key(e.u, e.v)
        adj[e.u][e.v] = adj[e.u].get(e.v, 0) + w
        adj[e.v][e.u] = adj[e.v].get(e.u, 0) + w
        ids[k] = ids.get(k, ()) + (e.id,)
    term = {t: t for t in inst.terminals}
    return _State(adj, ids, term, [], 0), scale


@dataclass
class _Stats:
    nodes: int = 0
    trace: list | None = None
    max_nodes: int = R.BNB_MAX_NODES
    lp: bool = True
    lp_calls: int = 0
    budget: int | None = None

    def visit(self, depth, lb, status):
        self.nodes += 1
        if self.nodes > self.max_nodes:
            raise SizeGuardError(f"branch-and-bound exceeded {self.max_nodes} nodes")
        if self.trace is not None and len(self.trace) < 100_000:
            self.trace.append((depth, lb, status))


def _isolating(st: _State, comp, t):
    sub = {u: st.adj[u] for u in comp}
    others = [u for u in comp if u in st.term and u != t]
    return min_cut(sub, [t], others)


def _reduce(st: _State, optimise: bool) -> list[tuple[list, int]] | None:
    """Apply reductions in place. Returns [(component, lower bound)] or None if infeasible."""
    while True:
        changed = False
        work = [v for v in st.adj if v not in st.term and len(st.adj[v]) <= 1]
        while work:
            v = work.pop()
            if v not in st.adj or v in st.term or len(st.adj[v]) > 1:
                continue
            nbs = list(st.adj[v])
            st.drop_vertex(v)
            changed = True
            work.extend(c for c in nbs if c not in st.term and len(st.adj[c]) <= 1)
        if optimise:
            for v in sorted(st.adj):
                if v not in st.adj or v in st.term:
                    continue
                nb = st.adj[v]
                if len(nb) < 2:
                    continue
                total = sum(nb.values())
                c, w = max(sorted(nb.items()), key=lambda kv: kv[1])
                if 2 * w >= total:
                    st.contract(c, v)
                    changed = True
        result = []
        for comp in st.components():
            terms = [u for u in comp if u in st.term]
            if len(terms) <= 1:
                for u in comp:
                    st.drop_vertex(u)
                changed = True
            elif optimise and len(terms) == 2:
                r = _isolating(st, comp, terms[0])
                side = r.near_side
                for u in comp:
                    if u in side:
                        for c in [c for c in st.adj[u] if c not in side]:
                            st.cut_edge(u, c)
                for u in comp:
                    st.drop_vertex(u)
                changed = True
            else:
                result.append((comp, terms))
        if changed:
            continue
        bounds = []
        for comp, terms in result:
            lam = 0
            for t in terms:
                if t not in st.adj:
                    # absorbed by a previous contraction in this pass
                    changed = True
                    break
                r = _isolating(st, [u for u in comp if u in st.adj], t)
                lam += r.value
                if optimise:
                    absorb = [u for u in r.far_side if u != t]
                    for u in absorb:
                        if not st.contract(t, u):
                            return None
                    if absorb:
                        changed = True
            if changed:
                break
            bounds.append((comp, (lam + 1) // 2))
        if not changed:
            return bounds


def _branch_edge(st: _State, comp, terms):
    """First edge (t, x) of a shortest path between two distinct terminals of comp."""
    origin = {t: t for t in terms}
    dist = {t: 0 for t in terms}
    parent = {}
    queue = deque(sorted(terms))
    while queue:
        x = queue.popleft()
        for y in sorted(st.adj[x]):
            if y not in origin:
                origin[y] = origin[x]
                dist[y] = dist[x] + 1
                parent[y] = x
                queue.append(y)
    best = None
    for x in comp:
        for y in st.adj[x]:
            if origin[x] != origin[y]:
                d = dist[x] + dist[y]
                cand = (d, min(origin[x], origin[y]), x, y)
                if best is None or cand < best:
                    best = cand
    _, _, x, y = best
    # walk back from x (or y) to its terminal, pick the edge leaving the terminal
    end = x if origin[x] == best[1] else y
    if end in st.term:
        other = y if end == x else x
        return end, other
    while parent[end] not in st.term:
        end = parent[end]
    return parent[end], end


def _pruned(stats: _Stats, lb: int) -> str:
    # "pruned": over the caller's budget; "dominated": only over the incumbent
    return "pruned" if stats.budget is None or lb > stats.budget else "dominated"


def _solve(st: _State, limit: int, stats: _Stats, depth: int = 0, offset: int = 0) -> _State | None:
    """Cheapest completion of st with total cost <= limit, or None.

    ``offset`` is what the rest of the instance is known to cost (committed
    cuts plus sibling bounds); the trace records offset + local bound, so every
    entry is a bound on the whole instance.
    """
    st = st.copy()
    bounds = _reduce(st, optimise=True)
    if bounds is None:
        stats.visit(depth, None, "infeasible")
        return None
    lb = st.cost + sum(b for _, b in bounds)
    if lb > limit:
        stats.visit(depth, offset + lb, _pruned(stats, offset + lb))
        return None
    if stats.lp and bounds:
        stats.lp_calls += 1
        bounds = [(comp, max(b, ckr_lower_bound({u: st.adj[u] for u in comp}, [u for u in comp if u in st.term])))
                  for comp, b in bounds]
        lb = st.cost + sum(b for _, b in bounds)
        if lb > limit:
            stats.visit(depth, offset + lb, _pruned(stats, offset + lb))
            return None
    if not bounds:
        stats.visit(depth, offset + lb, "leaf")
        return st
    if len(bounds) > 1:
        stats.visit(depth, offset + lb, "split")
        rest = lb - st.cost
        for comp, b in bounds:
            rest -= b
            sub = _solve(st.restrict(comp), limit - st.cost - rest, stats, depth + 1, offset + st.cost + rest)
            if sub is None:
                return None
            st.cost += sub.cost
            st.cut.extend(sub.cut)
        for comp, _ in bounds:
            for u in comp:
                if u in st.adj:
                    st.drop_vertex(u)
        return st
    stats.visit(depth, offset + lb, "branch")
    comp, _ = bounds[0]
    terms = [u for u in comp if u in st.term]
    t, x = _branch_edge(st, comp, terms)
    best = None
    keep = st.copy()
    if keep.contract(t, x):
        best = _solve(keep, limit, stats, depth + 1, offset)
        if best is not None:
            limit = best.cost - 1
    cut = st.copy()
    cut.cut_edge(t, x)
    if cut.cost <= limit:
        alt = _solve(cut, limit, stats, depth + 1, offset)
        if alt is not None:
            best = alt
    return best


def _scaled_budget(budget: Fraction, scale: int) -> int:
    return math.floor(Fraction(budget) * scale)


def _isolation_heuristic(st: _State) -> _State:
    """Union of all isolating cuts but the most expensive one: a feasible incumbent."""
    out = st.copy()
    terms = sorted(st.term)
    cuts = []
    for t in terms:
        r = min_cut(st.adj, [t], [u for u in terms if u != t])
        cuts.append((r.value, t, r.near_side))
    cuts.sort(key=lambda c: (-c[0], c[1]))
    for _, _, side in cuts[1:]:
        for u in side:
            for c in [c for c in out.adj[u] if c not in side]:
                out.cut_edge(u, c)
    return out


def bnb_emwc(inst: Instance, budget, trace: bool = True, max_nodes: int | None = None,
             lp: bool = True) -> SolveReport:
    """Cheapest edge multiway cut of weight <= budget; ``optimum`` is None if there is none.

    ``lp`` adds the certified LP relaxation bound to the flow bounds.
    """
    if inst.kind != EDGE:
        raise GraphError("bnb_emwc needs an edge instance")
    budget = Fraction(budget)
    st, scale = _initial_state(inst)
    limit = _scaled_budget(budget, scale)
    stats = _Stats(trace=[] if trace else None, max_nodes=max_nodes or R.BNB_MAX_NODES, lp=lp, budget=limit)
    res = None
    if len(st.term) >= 2:
        incumbent = _isolation_heuristic(st)
        if incumbent.cost <= limit:
            res = incumbent
            limit = incumbent.cost - 1
    better = _solve(st, limit, stats)
    if better is not None:
        res = better
    rep = SolveReport(None, None, stats.nodes, [(d, None if lb is None else Fraction(lb, scale), s)
                                                 for d, lb, s in (stats.trace or [])],
                      method="bnb+lp" if lp else "bnb", budget=budget)
    if res is not None:
        wit = CutSolution.of_edges(inst.graph, res.cut_ids())
        if wit.weight != Fraction(res.cost, scale) or not verify_cut(inst, wit):
            raise AssertionError("branch-and-bound produced an invalid witness")
        rep.optimum = wit.weight
        rep.witness = wit
    return rep


def root_lower_bound(inst: Instance, lp: bool = False) -> Fraction:
    """Half-sum isolating bound after the safe reductions (plus the LP bound if asked)."""
    st, scale = _initial_state(inst)
    bounds = _reduce(st, optimise=False)
    total = st.cost
    for comp, b in bounds:
        if lp:
            b = max(b, ckr_lower_bound({u: st.adj[u] for u in comp}, [u for u in comp if u in st.term]))
        total += b
    return Fraction(total, scale)


def solve_exact_emwc(inst: Instance, deterministic: bool = True, trace: bool = False,
                     lp: bool = True, max_nodes: int | None = None) -> SolveReport:
    """Optimum by ascending budget search from the root lower bound.

    Every budget below the optimum is refuted by a complete search, so the
    first feasible budget is the optimum. The sum of all weights is always
    feasible, which bounds the search. The search order is fixed, so the
    witness is reproducible; ``deterministic`` is kept for schedule-independent
    callers and currently has no parallel alternative.
    """
    if inst.kind != EDGE:
        raise GraphError("solve_exact_emwc needs an edge instance")
    if len(inst.terminals) <= 1:
        return SolveReport(Fraction(0), CutSolution.of_edges(inst.graph, ()), method="bnb")
    _, scale = _initial_state(inst)
    step = Fraction(1, scale)
    k = root_lower_bound(inst, lp=lp)
    total = inst.graph.total_weight()
    nodes = 0
    bound_trace: list = []
    while True:
        r = bnb_emwc(inst, min(k, total), trace=trace, lp=lp, max_nodes=max_nodes)
        nodes += r.nodes_explored
        bound_trace += r.bound_trace
        if r.feasible:
            break
        if k >= total:
            raise AssertionError("no multiway cut within the total weight")
        k += step
    out = SolveReport(r.optimum, r.witness, nodes, bound_trace, method=r.method)
    if deterministic:
        out.witness = CutSolution.of_edges(inst.graph, r.witness.sorted_items())
    return out


# --- enumeration of all minimum cuts ----------------------------------------


def _opt_value(st: _State, limit: int, stats: _Stats) -> int | None:
    r = _solve(st, limit, stats)
    return None if r is None else r.cost


def _enumerate(st: _State, target: int, stats: _Stats, out: list, cap: int, depth=0):
    """All completions of st costing exactly target (target is st's optimum)."""
    st = st.copy()
    bounds = _reduce(st, optimise=False)
    if bounds is None:
        return
    stats.visit(depth, st.cost + sum(b for _, b in bounds), "enum")
    if not bounds:
        if st.cost == target:
            out.append(frozenset(st.cut_ids()))
            if len(out) > cap:
                raise SizeGuardError(f"more than {cap} minimum cuts")
        return
    if len(bounds) > 1:
        parts = []
        budget = target - st.cost
        opts = []
        for comp, _ in bounds:
            v = _opt_value(st.restrict(comp), budget, stats)
            if v is None:
                return
            opts.append(v)
        if sum(opts) != budget:
            return
        for (comp, _), v in zip(bounds, opts):
            sols: list = []
            _enumerate(st.restrict(comp), v, stats, sols, cap, depth + 1)
            parts.append(sols)
        base = frozenset(st.cut_ids())
        combos = [base]
        for sols in parts:
            combos = [c | s for c in combos for s in sols]
            if len(combos) + len(out) > cap:
                raise SizeGuardError(f"more than {cap} minimum cuts")
        out.extend(combos)
        return
    comp, _ = bounds[0]
    terms = [u for u in comp if u in st.term]
    t, x = _branch_edge(st, comp, terms)
    for child in ("keep", "cut"):
        c = st.copy()
        if child == "keep":
            if not c.contract(t, x):
                continue
        else:
            c.cut_edge(t, x)
        if c.cost > target:
            continue
        v = _opt_value(c, target, stats)
        if v is not None and v == target:
            _enumerate(c, target, stats, out, cap, depth + 1)


def enumerate_min_cuts(inst: Instance, cap: int = R.ENUM_MAX_OPTIMA, max_nodes: int | None = None,
                       lp: bool = True):
    """Every minimum edge multiway cut (edge-id sets) and the optimum value."""
    if inst.kind != EDGE:
        raise GraphError("enumerate_min_cuts needs an edge instance")
    if len(inst.terminals) <= 1:
        return Fraction(0), {frozenset()}
    st, scale = _initial_state(inst)
    stats = _Stats(max_nodes=max_nodes or R.BNB_MAX_NODES, lp=lp)
    opt = _opt_value(st, _isolation_heuristic(st).cost, stats)
    out: list = []
    _enumerate(st, opt, stats, out, cap)
    return Fraction(opt, scale), set(out)
