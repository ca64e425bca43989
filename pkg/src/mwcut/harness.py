"""End-to-end pipelines, the bundled corpus and the minimum-cut audits.

verify_chain compiles one formula through the requested stages and decides
budget feasibility at each stage with the strongest solver that fits, then
compares against the brute-force SAT verdict. A stage that no solver can
decide within its guard is reported as skipped, never as passed.
"""

from __future__ import annotations

import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from importlib import resources

from .errors import MwcError, ReductionError, SizeGuardError
from .formula import Formula, brute_force_sat, from_json, gen_formula, to_json
from .gadgets import GadgetTrace, check_weighted, compile_weighted
from .graph import EDGE, CutSolution, Instance, MultiGraph, components, degree_profile, expand_parallel, verify_cut
from .honeycomb import DESK_PARAMS, HoneycombParams, rotation_is_planar, unweight
from .node_reductions import emwc_to_nmwc, formula_vertex_cover, node_cut_to_edge_cut, vc_to_nmwcdt
from .solvers import report as R
from .solvers.bnb import bnb_emwc, enumerate_min_cuts, solve_exact_emwc
from .solvers.node_bnb import bnb_nmwc, solve_exact_nmwc, solve_exact_nmwc_dt
from .solvers.node_milp import milp_nmwc
from .solvers.oracles import oracle_emwc, oracle_emwc_all_optima, oracle_nmwc

STAGES = ("weighted", "expanded", "honeycomb", "nmwc", "nmwc-dt")

# Beyond these sizes a stage falls back (node) or is skipped (honeycomb).
HONEYCOMB_SOLVE_MAX_VERTICES = 2_000
NODE_BNB_MAX_VERTICES = 60
NODE_ORACLE_MAX_VERTICES = 20


@dataclass(frozen=True)
class ChainParams:
    honeycomb: HoneycombParams = DESK_PARAMS
    node_solver: str = "auto"  # auto | bnb | milp
    milp_time_limit: float = 600.0
    max_nodes: int | None = None
    force: bool = False


@dataclass
class StageReport:
    stage: str
    stats: dict
    budget: str | None = None
    verdict: str = "skipped"  # feasible | infeasible | skipped: <reason>
    optimum: str | None = None
    method: str = ""
    matches: bool | None = None
    seconds: float = 0.0
    note: str = ""


@dataclass
class ChainReport:
    digest: str
    n: int
    m: int
    sat: bool
    budget: int
    stages: list[StageReport] = field(default_factory=list)
    equivalence: str = "pass"  # pass | fail | partial

    def as_dict(self) -> dict:
        return asdict(self)


def instance_stats(inst: Instance) -> dict:
    g = inst.graph
    prof = degree_profile(g, inst.terminals)
    return {
        "vertices": len(g.vertices),
        "edges": len(g.edges),
        "terminals": len(inst.terminals),
        "max_degree": prof.max_degree,
        "weights": sorted({str(e.w) for e in g.edges}, key=Fraction),
    }


def _settle(rep: StageReport, feasible: bool, sat: bool, optimum=None, method=""):
    rep.verdict = "feasible" if feasible else "infeasible"
    rep.optimum = None if optimum is None else str(optimum)
    rep.method = method
    rep.matches = feasible == sat


def _stage_weighted(f, sat, ctx, rep, params):
    inst, tr = compile_weighted(f)
    check_weighted(inst, tr)
    ctx["weighted"] = (inst, tr)
    rep.stats = instance_stats(inst)
    rep.budget = str(inst.budget)
    r = solve_exact_emwc(inst, max_nodes=params.max_nodes)
    _settle(rep, r.optimum <= inst.budget, sat, r.optimum, r.method)
    if sat and r.optimum != inst.budget:
        rep.matches = False
        rep.note = f"satisfiable but optimum {r.optimum} != {inst.budget}"


def _expanded(ctx) -> Instance:
    if "expanded" not in ctx:
        inst, _ = ctx["weighted"]
        ctx["expanded"] = Instance(expand_parallel(inst.graph), inst.terminals, inst.budget, EDGE)
    return ctx["expanded"]


def _stage_expanded(f, sat, ctx, rep, params):
    inst = _expanded(ctx)
    rep.stats = instance_stats(inst)
    rep.stats["rotation_planar"] = rotation_is_planar(inst.graph)
    rep.budget = str(inst.budget)
    r = bnb_emwc(inst, inst.budget, trace=False, max_nodes=params.max_nodes)
    _settle(rep, r.feasible, sat, r.optimum, r.method)


def _stage_honeycomb(f, sat, ctx, rep, params):
    winst, tr = ctx["weighted"]
    inst, _ = unweight(winst, tr, params.honeycomb)
    rep.stats = instance_stats(inst)
    rep.stats["rotation_planar"] = rotation_is_planar(inst.graph)
    rep.stats["honeycomb"] = [params.honeycomb.rows, params.honeycomb.cols, params.honeycomb.sep]
    rep.budget = str(inst.budget)
    if len(inst.graph.vertices) > HONEYCOMB_SOLVE_MAX_VERTICES and not R.forced(params.force):
        rep.verdict = "skipped: guard"
        rep.note = (f"{len(inst.graph.vertices)} vertices exceed the exact-solve limit "
                    f"{HONEYCOMB_SOLVE_MAX_VERTICES}; honeycomb avoidance is checked on single-honeycomb fixtures")
        return
    r = bnb_emwc(inst, inst.budget, trace=False, max_nodes=params.max_nodes)
    _settle(rep, r.feasible, sat, r.optimum, r.method)


def _solve_node(inst: Instance, budget, params: ChainParams):
    """(feasible, optimum or witness weight, method, witness); raises SizeGuardError if undecidable."""
    small = len(inst.graph.vertices) <= NODE_BNB_MAX_VERTICES
    choice = params.node_solver
    if choice == "bnb" or (choice == "auto" and small):
        r = bnb_nmwc(inst, budget, max_nodes=params.max_nodes)
        return r.feasible, r.optimum, r.method, r.witness
    if choice not in ("auto", "milp"):
        raise ReductionError(f"unknown node solver {choice!r}")
    r = milp_nmwc(inst, time_limit=params.milp_time_limit)
    feasible = r.feasible and r.optimum <= budget
    return feasible, r.optimum, r.method, r.witness if feasible else None


def _stage_nmwc(f, sat, ctx, rep, params):
    src = _expanded(ctx)
    inst, cmap = emwc_to_nmwc(src)
    rep.stats = instance_stats(inst)
    rep.budget = str(inst.budget)
    feasible, opt, method, wit = _solve_node(inst, inst.budget, params)
    if wit is not None:
        back = node_cut_to_edge_cut(src, cmap, wit)
        if back.weight > src.budget:
            raise AssertionError("node cut maps to an edge cut over budget")
    _settle(rep, feasible, sat, opt, method)


def _stage_nmwc_dt(f, sat, ctx, rep, params):
    g, k = formula_vertex_cover(f)
    inst = vc_to_nmwcdt(g, k)
    rep.stats = instance_stats(inst)
    rep.budget = str(k)
    rep.note = "formula encoded as vertex cover (clause cliques), then every vertex made a terminal"
    r = solve_exact_nmwc_dt(inst, max_nodes=params.max_nodes)
    _settle(rep, r.optimum <= k, sat, r.optimum, r.method)


_RUNNERS = {
    "weighted": _stage_weighted,
    "expanded": _stage_expanded,
    "honeycomb": _stage_honeycomb,
    "nmwc": _stage_nmwc,
    "nmwc-dt": _stage_nmwc_dt,
}


def parse_stages(text: str) -> tuple[str, ...]:
    out = tuple(s.strip() for s in text.split(",") if s.strip())
    bad = [s for s in out if s not in STAGES]
    if bad or not out:
        raise ValueError(f"unknown stages {bad}; choose from {', '.join(STAGES)}")
    return out


def verify_chain(f: Formula, stages=("weighted",), params: ChainParams = ChainParams()) -> ChainReport:
    stages = tuple(s for s in STAGES if s in set(stages))  # fixed order; later stages reuse earlier instances
    sat = brute_force_sat(f) is not None
    out = ChainReport(f.digest(), f.n, f.m, sat, f.budget)
    ctx: dict = {}
    needs_weighted = any(s in stages for s in ("weighted", "expanded", "honeycomb", "nmwc"))
    if needs_weighted and "weighted" not in stages:
        ctx["weighted"] = compile_weighted(f)
    for name in stages:
        rep = StageReport(name, {})
        t0 = time.perf_counter()
        try:
            _RUNNERS[name](f, sat, ctx, rep, params)
        except SizeGuardError as exc:
            rep.verdict = "skipped: guard"
            rep.note = str(exc)
        rep.seconds = round(time.perf_counter() - t0, 3)
        out.stages.append(rep)
    decided = [s for s in out.stages if s.matches is not None]
    if any(s.matches is False for s in decided):
        out.equivalence = "fail"
    elif len(decided) < len(out.stages) or not decided:
        out.equivalence = "partial"
    return out


def _chain_job(args):
    f, stages, params = args
    return verify_chain(f, stages, params)


def verify_many(formulas, stages=("weighted",), params: ChainParams = ChainParams(), workers: int = 1):
    """verify_chain over independent formulas; report order follows the input."""
    jobs = [(f, tuple(stages), params) for f in formulas]
    if workers <= 1 or len(jobs) <= 1:
        return [_chain_job(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_chain_job, jobs))


def check_edge_node_equivalence(inst: Instance, force: bool = False) -> dict:
    """Oracle edge optimum of a unit instance against the node optimum of its line-graph image."""
    edge = oracle_emwc(inst, force=force).optimum
    node_inst, cmap = emwc_to_nmwc(inst)
    if len(node_inst.graph.vertices) <= NODE_ORACLE_MAX_VERTICES:
        node = oracle_nmwc(node_inst, force=force)
    else:
        node = solve_exact_nmwc(node_inst)
    return {"edge_optimum": str(edge), "node_optimum": None if node.optimum is None else str(node.optimum),
            "method": node.method, "holds": node.optimum == edge}


# --- corpus --------------------------------------------------------------------

# (n, seed) of every bundled formula; satisfiability is recorded in the index.
CORPUS_SEEDS = (
    (2, 0), (2, 3), (2, 4), (2, 5), (2, 8),
    (3, 0), (3, 1), (3, 2), (3, 3), (3, 4),
    (4, 5), (4, 7),
    (4, 36), (4, 42), (4, 106),
)


@dataclass(frozen=True)
class CorpusEntry:
    name: str
    n: int
    seed: int
    sat: bool
    digest: str
    formula: Formula


def corpus_file_name(n: int, seed: int) -> str:
    return f"n{n}_s{seed}.json"


def build_corpus() -> tuple[dict, dict[str, str]]:
    """Regenerate (index, file name -> formula JSON) from the generator."""
    files = {}
    entries = []
    for n, seed in CORPUS_SEEDS:
        f = gen_formula(seed, n)
        name = corpus_file_name(n, seed)
        files[name] = to_json(f)
        entries.append({"file": name, "n": n, "seed": seed, "sat": brute_force_sat(f) is not None,
                        "digest": f.digest()})
    return {"formulas": entries}, files


def _corpus_dir():
    return resources.files("mwcut") / "data" / "corpus"


def load_corpus() -> list[CorpusEntry]:
    base = _corpus_dir()
    index = json.loads((base / "index.json").read_text())
    out = []
    for e in index["formulas"]:
        f = from_json((base / e["file"]).read_text())
        out.append(CorpusEntry(e["file"][:-5], e["n"], e["seed"], e["sat"], e["digest"], f))
    return out


def corpus_texts() -> dict[str, str]:
    base = _corpus_dir()
    return {p.name: p.read_text() for p in base.iterdir() if p.name.endswith(".json")}


# --- minimum-cut audits --------------------------------------------------------

CHECKS = ("heavy-edge", "cycle", "bundle", "honeycomb")


@dataclass
class CheckResult:
    check: str
    quantifier: str  # "exists" or "forall"
    applicable: bool
    holds: bool | None
    optima: int
    details: dict = field(default_factory=dict)


@dataclass
class AuditReport:
    optimum: str
    optima: int
    method: str
    results: list[CheckResult]

    def as_dict(self) -> dict:
        return asdict(self)


def all_min_cuts(inst: Instance, force: bool = False):
    """(optimum, set of edge-id frozensets, method): oracle inside its guard, else B&B enumeration."""
    g = inst.graph
    free = len(g.vertices) - len(inst.terminals)
    if len(g.edges) <= R.SUBSET_MAX_EDGES or free <= R.LABELING_MAX_FREE_VERTICES:
        cuts = oracle_emwc_all_optima(inst, force=force)
        opt = sum((g.edge(e).w for e in next(iter(cuts))), Fraction(0))
        return opt, cuts, "oracle"
    opt, cuts = enumerate_min_cuts(inst)
    return opt, cuts, "bnb-enumeration"


def heavy_edge_candidates(inst: Instance) -> list[dict]:
    """Edges outweighing the rest of the star at some endpoint, with whether the hypothesis applies there."""
    g = inst.graph
    ts = set(inst.terminals)
    out = []
    for e in g.edges:
        for v in dict.fromkeys((e.u, e.v)):
            rest = g.weighted_degree(v) - e.w
            if e.w >= rest:
                out.append({"edge": e.id, "at": v,
                            "applicable": v not in ts and g.degree(v) > 2 and e.u != e.v})
    return out


def cycle_violations(g: MultiGraph, cut) -> list[int]:
    """Cut edges whose endpoints stay connected without the cut: each closes a cycle meeting the cut once."""
    comp = components(g, removed_edges=cut)
    return sorted(e for e in cut if comp[g.edge(e).u] == comp[g.edge(e).v])


def bundle_failures(cut, tr: GadgetTrace) -> list[str]:
    """Reasons the cut breaks base-per-variable, two-per-link or base-per-clause structure."""
    bad = []
    for vg in tr.variables:
        nb = (vg.diamond_base in cut) + (vg.hat_base in cut)
        if nb != 1:
            bad.append(f"variable x{vg.var}: {nb} bases")
    for ls in tr.link_structures:
        c = sum(1 for e in (*ls.variable_side, *ls.clause_side) if e in cut)
        if c < 2:
            bad.append(f"link-structure {ls.index}: {c} edges")
    for cg in tr.clauses:
        nb = sum(1 for t in cg.triangles if t.base in cut)
        if nb != 1:
            bad.append(f"clause {cg.index}: {nb} bases")
    return bad


def _audit_heavy(inst, optima, _tr):
    cands = heavy_edge_candidates(inst)
    rows = []
    for c in cands:
        avoided = any(c["edge"] not in s for s in optima)
        rows.append({**c, "some_optimum_avoids": avoided})
    app = [r for r in rows if r["applicable"]]
    app_edges = {r["edge"] for r in app}
    joint = any(not (app_edges & s) for s in optima)
    holds = all(r["some_optimum_avoids"] for r in app) and joint if app else None
    return CheckResult("heavy-edge", "exists", bool(app), holds, len(optima),
                       {"candidates": rows, "one_optimum_avoids_all": joint,
                        "violations": [r for r in rows if not r["some_optimum_avoids"]]})


def _audit_cycle(inst, optima, _tr):
    bad = {}
    for s in sorted(optima, key=sorted):
        v = cycle_violations(inst.graph, s)
        if v:
            bad[",".join(map(str, sorted(s)))] = v
    return CheckResult("cycle", "forall", bool(optima), not bad, len(optima), {"counterexamples": bad})


def _audit_bundle(inst, optima, tr):
    if tr is None or not tr.variables:
        return CheckResult("bundle", "exists", False, None, len(optima), {"reason": "no gadget trace"})
    weight = {e.id: e.w for e in inst.graph.edges}
    within = [s for s in optima if sum((weight[e] for e in s), Fraction(0)) <= inst.budget]
    fails = {}
    witness = None
    for s in sorted(optima, key=sorted):
        b = bundle_failures(s, tr)
        if not b and witness is None:
            witness = sorted(s)
        elif b:
            fails[",".join(map(str, sorted(s)))] = b
    details = {"witness": witness, "failures": dict(list(fails.items())[:20])}
    if not within:
        details["reason"] = "optimum exceeds the budget (unsatisfiable formula)"
        return CheckResult("bundle", "exists", False, None, len(optima), details)
    return CheckResult("bundle", "exists", True, witness is not None, len(optima), details)


def _audit_honeycomb(inst, optima, tr):
    hc = tr.honeycomb_edges() if tr is not None else frozenset()
    if not hc:
        # honeycomb_replace marks grid edges with an explicit None provenance
        hc = frozenset(e for e, p in inst.graph.provenance.items() if p is None)
    if not hc:
        return CheckResult("honeycomb", "forall", False, None, len(optima), {"reason": "no honeycomb edges"})
    bad = {",".join(map(str, sorted(s))): sorted(s & hc) for s in sorted(optima, key=sorted) if s & hc}
    return CheckResult("honeycomb", "forall", True, not bad, len(optima),
                       {"honeycomb_edges": len(hc), "counterexamples": dict(list(bad.items())[:20])})


_AUDITS = {"heavy-edge": _audit_heavy, "cycle": _audit_cycle, "bundle": _audit_bundle,
           "honeycomb": _audit_honeycomb}


def audit_min_cuts(inst: Instance, trace: GadgetTrace | None = None, checks=CHECKS, optima=None,
                   force: bool = False) -> AuditReport:
    """Evaluate the structural checks over every minimum cut.

    ``optima`` replaces the enumerated family; negative controls use it to
    feed a fabricated family through the same predicates.
    """
    if inst.kind != EDGE:
        raise MwcError("audits need an edge instance")
    if optima is None:
        opt, optima, method = all_min_cuts(inst, force=force)
    else:
        optima = {frozenset(s) for s in optima}
        w = {e.id: e.w for e in inst.graph.edges}
        opt = min((sum((w[e] for e in s), Fraction(0)) for s in optima), default=Fraction(0))
        method = "supplied"
    for s in optima:
        if not verify_cut(inst, CutSolution.of_edges(inst.graph, s)):
            raise AssertionError("audited family contains a non-cut")
    results = [_AUDITS[c](inst, optima, trace) for c in checks]
    return AuditReport(str(opt), len(optima), method, results)


def parse_checks(text: str) -> tuple[str, ...]:
    out = tuple(s.strip() for s in text.split(",") if s.strip())
    bad = [s for s in out if s not in CHECKS]
    if bad or not out:
        raise ValueError(f"unknown checks {bad}; choose from {', '.join(CHECKS)}")
    return out
