"""Command-line entry point: JSON on stdout, a one-line summary on stderr.

Exit codes: 0 ok, 1 failed check or invalid input, 2 usage error,
3 budget-infeasible, 4 size guard exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__
from .errors import FormulaError, MwcError, SizeGuardError, UnsafeHoneycombError
from .formula import Formula, gen_formula, load, to_dimacs, to_json, validate_formula
from .gadgets import compile_weighted
from .graph import EDGE, NODE, NODE_DT, Instance, expand_parallel, verify_cut, CutSolution
from .graphio import dumps, instance_from_obj, instance_to_obj, to_dot
from .honeycomb import DESK_PARAMS, HoneycombParams, unweight

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_INFEASIBLE, EXIT_GUARD = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


def _read(path: str | None) -> str:
    if path in (None, "-"):
        return sys.stdin.read()
    return Path(path).read_text()


def _emit(obj, summary: str):
    sys.stdout.write(obj if isinstance(obj, str) else dumps(obj))
    print(summary, file=sys.stderr)


def _formula(args) -> Formula:
    return load(_read(args.input))


def _instance(text: str) -> Instance:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"expected instance JSON: {exc}") from exc
    return instance_from_obj(obj.get("instance", obj))


def _hc_params(args) -> HoneycombParams:
    return HoneycombParams(args.hc_rows or DESK_PARAMS.rows, args.hc_cols or DESK_PARAMS.cols,
                           args.hc_sep or DESK_PARAMS.sep)


# --- subcommands -----------------------------------------------------------------


def cmd_validate(args) -> int:
    f = _formula(args)
    v = validate_formula(f)
    _emit({"valid": bool(v), **v.as_dict(), "n": f.n, "m": f.m, "digest": f.digest()},
          f"formula {'valid' if v else 'invalid'}: n={f.n} m={f.m}")
    return EXIT_OK if v else EXIT_FAIL


def cmd_gen(args) -> int:
    f = gen_formula(args.seed, args.n)
    text = to_dimacs(f) if args.format == "dimacs" else to_json(f)
    _emit(text, f"generated n={f.n} m={f.m} digest={f.digest()}")
    return EXIT_OK


def cmd_reduce(args) -> int:
    text = _read(args.input)
    target = args.target
    if target == "nmwc-dt":
        from .node_reductions import formula_vertex_cover, vc_to_nmwcdt

        g, k = formula_vertex_cover(load(text))
        inst = vc_to_nmwcdt(g, k)
        _emit(instance_to_obj(inst), f"nmwc-dt via vertex cover: {len(g.vertices)} vertices, k={k}")
        return EXIT_OK
    f = load(text)
    v = validate_formula(f)
    if not v:
        raise FormulaError(f"invalid formula: {v.rule}: {v.detail}")
    inst, tr = compile_weighted(f)
    if target == "weighted":
        obj = instance_to_obj(inst)
        obj["trace"] = tr.to_obj()
    elif target == "unweighted":
        inst, tr = unweight(inst, tr, _hc_params(args))
        obj = instance_to_obj(inst)
        obj["trace"] = tr.to_obj()
    else:  # nmwc
        from .node_reductions import emwc_to_nmwc

        unit = Instance(expand_parallel(inst.graph), inst.terminals, inst.budget, EDGE)
        inst, cmap = emwc_to_nmwc(unit)
        obj = instance_to_obj(inst)
        obj["terminal_cliques"] = cmap.to_obj()
    g = inst.graph
    _emit(obj, f"{target}: {len(g.vertices)} vertices, {len(g.edges)} edges, "
               f"{len(inst.terminals)} terminals, k={inst.budget}")
    return EXIT_OK


def _solve_report(inst: Instance, solver: str, budget, deterministic: bool):
    from .solvers import bnb, node_bnb, oracles
    from .solvers.maxflow import max_flow_min_cut
    from .solvers.report import SolveReport

    kind = inst.kind
    if solver == "maxflow2t":
        if kind != EDGE or len(inst.terminals) != 2:
            raise UsageError("maxflow2t needs an edge instance with exactly two terminals")
        value, cut = max_flow_min_cut(inst.graph, *inst.terminals)
        return SolveReport(value, CutSolution.of_edges(inst.graph, cut), method="maxflow")
    if solver == "oracle":
        fn = {EDGE: oracles.oracle_emwc, NODE: oracles.oracle_nmwc, NODE_DT: oracles.oracle_nmwc_dt}[kind]
        return fn(inst)
    if kind == EDGE:
        if budget is not None:
            return bnb.bnb_emwc(inst, budget)
        return bnb.solve_exact_emwc(inst, deterministic=deterministic, trace=True)
    if kind == NODE:
        return node_bnb.bnb_nmwc(inst, budget) if budget is not None else node_bnb.solve_exact_nmwc(inst)
    return node_bnb.solve_exact_nmwc_dt(inst)


def cmd_solve(args) -> int:
    inst = _instance(_read(args.input))
    if args.problem:
        want = {"edge": EDGE, "node": NODE, "node-dt": NODE_DT}[args.problem]
        if want != inst.kind:
            inst = Instance(inst.graph, inst.terminals, inst.budget, want)
    budget = Fraction(args.budget) if args.budget is not None else None
    rep = _solve_report(inst, args.solver, budget, args.deterministic)
    if budget is not None and rep.budget is None:
        # oracle, maxflow and node-dt solvers return an optimum; judge it against the budget here
        rep.budget = budget
        if rep.optimum is not None and rep.optimum > budget:
            rep.optimum, rep.witness = None, None
    if rep.witness is not None and not verify_cut(inst, rep.witness):
        raise AssertionError("solver witness failed verification")
    obj = rep.as_dict()
    _emit(obj, f"{rep.method}: {obj['status']} {obj['optimum'] or ''}".rstrip())
    if budget is not None and not rep.feasible:
        return EXIT_INFEASIBLE
    return EXIT_OK


def _formulas_for(args):
    from .harness import load_corpus

    if args.inputs:
        return [(p, load(_read(p))) for p in args.inputs]
    entries = load_corpus()
    if args.max_n:
        entries = [e for e in entries if e.n <= args.max_n]
    return [(e.name, e.formula) for e in entries]


def _chain_params(args):
    from .harness import ChainParams

    return ChainParams(honeycomb=_hc_params(args), node_solver=args.node_solver,
                       milp_time_limit=args.milp_time_limit)


def cmd_verify_chain(args) -> int:
    from .harness import parse_stages, verify_many

    try:
        stages = parse_stages(args.stages)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    named = _formulas_for(args)
    reports = verify_many([f for _, f in named], stages, _chain_params(args), workers=args.workers)
    out = [{"name": name, **r.as_dict()} for (name, _), r in zip(named, reports)]
    counts = {k: sum(1 for r in reports if r.equivalence == k) for k in ("pass", "partial", "fail")}
    _emit(out, f"verify-chain: {counts['pass']} pass, {counts['partial']} partial, {counts['fail']} fail")
    return EXIT_FAIL if counts["fail"] else EXIT_OK


def cmd_audit(args) -> int:
    from . import fixtures
    from .harness import audit_min_cuts, parse_checks

    try:
        checks = parse_checks(args.checks)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    if args.fixture:
        kind, _, arg = args.fixture.partition(":")
        builders = {
            "honeycomb": lambda: fixtures.honeycomb_fixture(int(arg or 0)),
            "unsafe-honeycomb": fixtures.unsafe_honeycomb_control,
            "heavy-terminal-edge": fixtures.heavy_terminal_edge_control,
        }
        if kind not in builders:
            raise UsageError(f"unknown fixture {kind!r}; choose from {', '.join(builders)}")
        inst, tr = builders[kind](), None
    else:
        inst, tr = compile_weighted(_formula(args))
    rep = audit_min_cuts(inst, tr, checks)
    status = {r.check: ("n/a" if r.holds is None else "holds" if r.holds else "FAILS") for r in rep.results}
    _emit(rep.as_dict(), f"audit over {rep.optima} minimum cuts (optimum {rep.optimum}): "
                         + ", ".join(f"{k} {v}" for k, v in status.items()))
    return EXIT_FAIL if any(r.holds is False for r in rep.results) else EXIT_OK


def cmd_export_dot(args) -> int:
    text = _read(args.input)
    obj = json.loads(text)
    inst = instance_from_obj(obj.get("instance", obj))
    cut = []
    if args.highlight_cut:
        c = json.loads(Path(args.highlight_cut).read_text())
        if isinstance(c, dict):
            c = (c.get("witness") or {}).get("items", c.get("items", []))
        cut = [int(x) for x in c]
    gray = [e for e, p in inst.graph.provenance.items() if p is None]
    _emit(to_dot(inst, cut, gray), f"dot: {len(inst.graph.vertices)} vertices, {len(cut)} highlighted")
    return EXIT_OK


def cmd_report(args) -> int:
    from . import plotting
    from .harness import parse_stages, verify_many
    from .solvers.bnb import solve_exact_emwc

    try:
        stages = parse_stages(args.stages)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    named = _formulas_for(args)
    reports = verify_many([f for _, f in named], stages, _chain_params(args), workers=args.workers)
    files = [plotting.write_tsv(reports, out / "stages.tsv")]
    if "weighted" in stages:
        files.append(plotting.plot_budget_gap(reports, out / "budget_gap.png"))
    files.append(plotting.plot_stage_sizes(reports, out / "stage_sizes.png"))
    files.append(plotting.plot_stage_times(reports, out / "stage_times.png"))
    hardest = max(named, key=lambda nf: (nf[1].n, nf[1].m))
    inst, _ = compile_weighted(hardest[1])
    rep = solve_exact_emwc(inst, trace=True)
    files.append(plotting.plot_bound_trace(rep.bound_trace, hardest[1].budget, out / "bound_trace.png",
                                           title=f"lower bounds, {hardest[0]}"))
    summary = {"files": [str(p) for p in files], "reports": [{"name": n, **r.as_dict()}
                                                             for (n, _), r in zip(named, reports)]}
    counts = {k: sum(1 for r in reports if r.equivalence == k) for k in ("pass", "partial", "fail")}
    _emit(summary, f"report: {len(files)} files in {out}; {counts}")
    return EXIT_FAIL if counts["fail"] else EXIT_OK


# --- parser ----------------------------------------------------------------------


def _add_hc(p):
    p.add_argument("--hc-rows", type=int, help=f"honeycomb rows (default {DESK_PARAMS.rows})")
    p.add_argument("--hc-cols", type=int, help=f"honeycomb columns (default {DESK_PARAMS.cols})")
    p.add_argument("--hc-sep", type=int, help=f"attachment separation in slots (default {DESK_PARAMS.sep})")


def _add_chain(p):
    p.add_argument("inputs", nargs="*", help="formula files (default: the bundled corpus)")
    p.add_argument("--stages", default="weighted", help="comma list of weighted,expanded,honeycomb,nmwc,nmwc-dt")
    p.add_argument("--max-n", type=int, help="only corpus formulas with at most this many variables")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--node-solver", choices=("auto", "bnb", "milp"), default="auto")
    p.add_argument("--milp-time-limit", type=float, default=600.0)
    _add_hc(p)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="mwcut", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"mwcut {__version__}")
    ap.add_argument("--deterministic", action="store_true", help="canonical (smallest edge-id) witnesses")
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("validate", help="check a CNF or JSON formula")
    p.add_argument("input", nargs="?")
    p.set_defaults(fn=cmd_validate)

    p = sub.add_parser("gen", help="seeded valid formula")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--format", choices=("json", "dimacs"), default="json")
    p.set_defaults(fn=cmd_gen)

    p = sub.add_parser("reduce", help="compile a formula into a cut instance")
    p.add_argument("input", nargs="?")
    p.add_argument("--target", choices=("weighted", "unweighted", "nmwc", "nmwc-dt"), required=True)
    _add_hc(p)
    p.set_defaults(fn=cmd_reduce)

    p = sub.add_parser("solve", help="solve an instance")
    p.add_argument("input", nargs="?")
    p.add_argument("--problem", choices=("edge", "node", "node-dt"))
    p.add_argument("--solver", choices=("oracle", "bnb", "maxflow2t"), default="bnb")
    p.add_argument("--budget")
    p.set_defaults(fn=cmd_solve)

    p = sub.add_parser("verify-chain", help="check SAT verdicts against every stage")
    _add_chain(p)
    p.set_defaults(fn=cmd_verify_chain)

    p = sub.add_parser("audit", help="structural checks over all minimum cuts")
    p.add_argument("input", nargs="?")
    p.add_argument("--checks", default="heavy-edge,cycle,bundle")
    p.add_argument("--fixture", help="honeycomb[:seed], unsafe-honeycomb or heavy-terminal-edge")
    p.set_defaults(fn=cmd_audit)

    p = sub.add_parser("export-dot", help="Graphviz rendering of an instance")
    p.add_argument("input", nargs="?")
    p.add_argument("--highlight-cut", help="JSON list of ids, or a solve report")
    p.set_defaults(fn=cmd_export_dot)

    p = sub.add_parser("report", help="run the chain and write a table and figures")
    _add_chain(p)
    p.add_argument("--out", default="report")
    p.set_defaults(fn=cmd_report)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.fn(args)
    except (UsageError, UnsafeHoneycombError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SizeGuardError as exc:
        print(f"error: size guard: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except (MwcError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
