"""Node multiway cut as a 0/1 program, handed to HiGHS through scipy.

Each vertex either takes exactly one terminal label or is deleted; an edge
between two surviving vertices forces equal labels. This is the fallback for
node instances (line graphs of compiled formulas) that are too large for the
exact node branch-and-bound.

Trust model: a returned witness is rechecked with ``verify_cut``, so a
feasible answer is exact. An infeasible answer (optimum above the budget)
rests on the solver's floating-point search and is labelled as such in
``method``.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np
from scipy.optimize import Bounds, LinearConstraint, milp
from scipy.sparse import coo_matrix

from ..errors import GraphError, SizeGuardError
from ..graph import NODE, CutSolution, Instance, verify_cut
from .report import SolveReport

MILP_METHOD = "node-milp(highs; infeasibility uncertified)"


def milp_nmwc(inst: Instance, time_limit: float | None = 600.0) -> SolveReport:
    """Minimum node multiway cut (terminals undeletable); ``optimum`` None if none exists."""
    if inst.kind != NODE:
        raise GraphError("milp_nmwc needs a node instance")
    g = inst.graph
    terms = list(inst.terminals)
    k = len(terms)
    if k <= 1:
        return SolveReport(Fraction(0), CutSolution.of_vertices(g, ()), method=MILP_METHOD)
    tindex = {t: i for i, t in enumerate(terms)}
    for e in g.edges:
        if e.u in tindex and e.v in tindex and e.u != e.v:
            return SolveReport(None, None, method=MILP_METHOD)
    verts = list(g.vertices)
    vindex = {v: i for i, v in enumerate(verts)}
    nv = len(verts)
    nlab = nv * k
    nvar = nlab + nv  # labels x[v, t], then deletions d[v]

    cost = np.zeros(nvar)
    cost[nlab:] = 1
    lo = np.zeros(nvar)
    hi = np.ones(nvar)
    for t, ti in tindex.items():
        base = vindex[t] * k
        lo[base + ti] = 1
        hi[base:base + k] = 0
        hi[base + ti] = 1
        hi[nlab + vindex[t]] = 0

    rows, cols, vals = [], [], []
    r = 0
    for e in g.edges:
        if e.u == e.v:
            continue
        for a, b in ((e.u, e.v), (e.v, e.u)):
            # x[a, t] <= x[b, t] + d[b]
            for t in range(k):
                rows += [r, r, r]
                cols += [vindex[a] * k + t, vindex[b] * k + t, nlab + vindex[b]]
                vals += [1, -1, -1]
                r += 1
    link = coo_matrix((vals, (rows, cols)), shape=(r, nvar)).tocsr()
    er, ec = [], []
    for v in verts:
        i = vindex[v]
        er += [i] * (k + 1)
        ec += [i * k + t for t in range(k)] + [nlab + i]
    one = coo_matrix((np.ones(len(er)), (er, ec)), shape=(nv, nvar)).tocsr()
    options = {"time_limit": time_limit} if time_limit else {}
    res = milp(cost, constraints=[LinearConstraint(link, -np.inf, 0), LinearConstraint(one, 1, 1)],
               integrality=np.ones(nvar), bounds=Bounds(lo, hi), options=options)
    if res.status == 1:
        raise SizeGuardError(f"node MILP hit its {time_limit}s time limit")
    if res.status == 2:
        return SolveReport(None, None, method=MILP_METHOD)
    if res.status != 0 or res.x is None:
        raise SizeGuardError(f"node MILP failed: {res.message}")
    cut = [v for v in verts if v not in tindex and res.x[nlab + vindex[v]] > 0.5]
    wit = CutSolution.of_vertices(g, cut)
    if not verify_cut(inst, wit):
        raise AssertionError("node MILP returned a cut that does not separate the terminals")
    return SolveReport(wit.weight, wit, method=MILP_METHOD)
