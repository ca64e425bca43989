"""Certified LP lower bounds for edge and node multiway cut.

Edge version: the simplex-embedding relaxation. Every non-terminal vertex v
gets a distribution x[v, t] over the terminals and every edge e pays
w(e)/2 * sum_t |x[u, t] - x[v, t]|.

Node version: the distance relaxation. Vertices get lengths x[v] in [0, 1],
and for each terminal t, potentials p_t never grow faster along an edge than
the length of the vertex entered. p_t is 0 at t and 1 at every other terminal.

Both LPs are solved in floating point, but the value is never trusted. The
duals are rounded and plugged into the Lagrangian, whose minimum over the
variable box is evaluated exactly with integers. That makes the bound valid
whatever the solver's accuracy.
"""

from __future__ import annotations

import numpy as np
from scipy.optimize import linprog
from scipy.sparse import coo_matrix

_DUAL_SCALE = 1 << 24

Row = tuple[list[tuple[int, int]], int]


def _certified_min(cost: list[int], eq_rows: list[Row], ub_rows: list[Row], lo: list[int], hi: list[int]):
    """Certified lower bound on min cost.x over the rows and the integer box, as (numerator, denominator)."""
    nvar = len(cost)

    def sparse(rows):
        r, c, d = [], [], []
        for i, (coefs, _) in enumerate(rows):
            for var, a in coefs:
                r.append(i)
                c.append(var)
                d.append(a)
        return coo_matrix((d, (r, c)), shape=(len(rows), nvar)).tocsr()

    res = linprog(
        np.array(cost, dtype=float),
        A_ub=sparse(ub_rows) if ub_rows else None,
        b_ub=np.array([b for _, b in ub_rows], dtype=float) if ub_rows else None,
        A_eq=sparse(eq_rows) if eq_rows else None,
        b_eq=np.array([b for _, b in eq_rows], dtype=float) if eq_rows else None,
        bounds=list(zip(lo, hi)), method="highs",
    )
    if res.status != 0:
        return 0, 1
    y = [round(val * _DUAL_SCALE) for val in res.eqlin.marginals] if eq_rows else []
    mu = [min(0, round(val * _DUAL_SCALE)) for val in res.ineqlin.marginals] if ub_rows else []
    reduced = [c * _DUAL_SCALE for c in cost]
    bound = 0
    for rows, mults in ((eq_rows, y), (ub_rows, mu)):
        for (coefs, rhs), m in zip(rows, mults):
            if m:
                bound += rhs * m
                for var, a in coefs:
                    reduced[var] -= a * m
    for r, a, b in zip(reduced, lo, hi):
        bound += r * (a if r >= 0 else b)
    return bound, _DUAL_SCALE


def _ceil_div(a: int, b: int) -> int:
    return -((-a) // b)


def ckr_lower_bound(adj: dict, terminals: list) -> int:
    """Integer lower bound on the minimum edge multiway cut of an integer-weighted graph.

    ``adj`` is a symmetric dict-of-dicts of integer weights.
    """
    terms = list(terminals)
    k = len(terms)
    if k <= 1:
        return 0
    tindex = {t: i for i, t in enumerate(terms)}
    free = [v for v in adj if v not in tindex]
    vindex = {v: i for i, v in enumerate(free)}
    edges = [(u, v, w) for u in adj for v, w in adj[u].items() if u < v]
    nx_ = len(free) * k
    nvar = nx_ + len(edges) * k
    if nvar == 0:  # terminals only, no edges: nothing to cut
        return 0

    def xv(v, t):
        return vindex[v] * k + t

    def zv(j, t):
        return nx_ + j * k + t

    # objective is twice the cut: sum_e w_e sum_t z_{e,t}, integer coefficients
    cost = [0] * nvar
    for j, (_, _, w) in enumerate(edges):
        for t in range(k):
            cost[zv(j, t)] = w
    eq_rows = [([(xv(v, t), 1) for t in range(k)], 1) for v in free]
    ub_rows = []
    for j, (u, v, _) in enumerate(edges):
        for t in range(k):
            for a, b in ((u, v), (v, u)):
                # x_a,t - x_b,t - z_e,t <= 0, terminal coordinates moved to the rhs
                coefs = [(zv(j, t), -1)]
                rhs = 0
                if a in tindex:
                    rhs -= 1 if tindex[a] == t else 0
                else:
                    coefs.append((xv(a, t), 1))
                if b in tindex:
                    rhs += 1 if tindex[b] == t else 0
                else:
                    coefs.append((xv(b, t), -1))
                ub_rows.append((coefs, rhs))
    num, den = _certified_min(cost, eq_rows, ub_rows, [0] * nvar, [1] * nvar)
    return max(0, _ceil_div(num, 2 * den))


def node_lower_bound(adj: dict, terminals: list) -> int:
    """Integer lower bound on the minimum node multiway cut (terminals undeletable).

    ``adj`` maps each vertex to its neighbour set.
    """
    terms = list(terminals)
    k = len(terms)
    if k <= 1:
        return 0
    tset = set(terms)
    verts = list(adj)
    vindex = {v: i for i, v in enumerate(verts)}
    nverts = len(verts)
    nvar = nverts + k * nverts  # lengths, then potentials per terminal

    def pv(t, v):
        return nverts + t * nverts + vindex[v]

    cost = [0 if v in tset else 1 for v in verts] + [0] * (k * nverts)
    lo = [0] * nvar
    hi = [0 if v in tset else 1 for v in verts] + [1] * (k * nverts)
    for ti, t in enumerate(terms):
        for s in terms:
            lo[pv(ti, s)] = hi[pv(ti, s)] = 0 if s == t else 1
    ub_rows = []
    for u in verts:
        for v in adj[u]:
            for ti in range(k):
                # p_t(v) - p_t(u) - x_v <= 0
                ub_rows.append(([(pv(ti, v), 1), (pv(ti, u), -1), (vindex[v], -1)], 0))
    num, den = _certified_min(cost, [], ub_rows, lo, hi)
    return max(0, _ceil_div(num, den))
