import io
import json
import subprocess
import sys

import pytest

from mwcut.cli import EXIT_FAIL, EXIT_GUARD, EXIT_INFEASIBLE, EXIT_OK, EXIT_USAGE, main
from mwcut.formula import gen_formula, to_dimacs, to_json
from mwcut.graph import Instance, MultiGraph
from mwcut.graphio import instance_to_json


@pytest.fixture
def run(monkeypatch, capsys):
    def _run(argv, stdin=""):
        monkeypatch.setattr(sys, "stdin", io.StringIO(stdin))
        code = main(argv)
        out, err = capsys.readouterr()
        return code, out, err
    return _run


def test_gen_reduce_solve_pipeline(run):
    code, formula, _ = run(["gen", "--seed", "1", "--n", "2"])
    assert code == EXIT_OK
    code, inst, err = run(["reduce", "--target", "weighted"], formula)
    assert code == EXIT_OK and "k=20" in err
    code, out, _ = run(["solve", "--solver", "bnb", "--budget", "20"], inst)
    rep = json.loads(out)
    assert code == EXIT_OK and rep["optimum"] == "20"
    code, out, _ = run(["solve", "--solver", "bnb", "--budget", "19"], inst)
    assert code == EXIT_INFEASIBLE and json.loads(out)["optimum"] is None


def test_validate(run, tmp_path):
    p = tmp_path / "f.cnf"
    p.write_text(to_dimacs(gen_formula(3, 3)))
    assert run(["validate", str(p)])[0] == EXIT_OK
    code, out, _ = run(["validate"], "p cnf 2 3\n1 2 0\n1 2 0\n1 -2 0\n")
    assert code == EXIT_FAIL and json.loads(out)["rule"] == "occurrence"


def test_unsafe_honeycomb_is_usage_error(run):
    formula = to_json(gen_formula(1, 2))
    code, out, err = run(["reduce", "--target", "unweighted", "--hc-sep", "4"], formula)
    assert code == EXIT_USAGE and "unsafe honeycomb parameters" in err and out == ""


def test_reduce_targets(run):
    formula = to_json(gen_formula(1, 2))
    code, out, _ = run(["reduce", "--target", "unweighted", "--hc-rows", "20", "--hc-cols", "20",
                        "--hc-sep", "13"], formula)
    obj = json.loads(out)
    assert code == EXIT_OK and obj["kind"] == "edge" and obj["trace"]["honeycombs"]
    code, out, _ = run(["reduce", "--target", "nmwc"], formula)
    assert code == EXIT_OK and json.loads(out)["kind"] == "node"
    code, out, _ = run(["reduce", "--target", "nmwc-dt"], formula)
    assert code == EXIT_OK and json.loads(out)["kind"] == "node-deletable"


def test_solve_variants(run):
    g = MultiGraph.build([0, 1, 2], [(0, 0, 1, 2), (1, 1, 2, 3)])
    text = instance_to_json(Instance(g, (0, 2)))
    for solver in ("oracle", "bnb", "maxflow2t"):
        code, out, _ = run(["--deterministic", "solve", "--solver", solver], text)
        assert code == EXIT_OK and json.loads(out)["optimum"] == "2"
    code, out, _ = run(["solve", "--problem", "node", "--solver", "oracle"], text)
    assert code == EXIT_OK and json.loads(out)["optimum"] == "1"
    code, out, _ = run(["solve", "--problem", "node-dt", "--solver", "bnb", "--budget", "0"], text)
    assert code == EXIT_INFEASIBLE


def test_maxflow_needs_two_terminals(run):
    g = MultiGraph.build([0, 1, 2], [(0, 0, 1), (1, 1, 2)])
    code, _, err = run(["solve", "--solver", "maxflow2t"], instance_to_json(Instance(g, (0, 1, 2))))
    assert code == EXIT_USAGE and "two terminals" in err


def test_oracle_guard_exit_4(run):
    g = MultiGraph.build(range(30), [(i, i, i + 1) for i in range(29)])
    code, _, err = run(["solve", "--solver", "oracle"], instance_to_json(Instance(g, (0, 29))))
    assert code == EXIT_GUARD and "size guard" in err


def test_verify_chain_corpus(run):
    code, out, err = run(["verify-chain", "--stages", "weighted,nmwc", "--max-n", "2"])
    reports = json.loads(out)
    assert code == EXIT_OK and len(reports) == 5
    assert all(r["equivalence"] == "pass" for r in reports) and "5 pass" in err


def test_verify_chain_bad_stage(run):
    assert run(["verify-chain", "--stages", "bogus"])[0] == EXIT_USAGE


def test_audit_fixtures(run):
    code, out, _ = run(["audit", "--checks", "honeycomb", "--fixture", "unsafe-honeycomb"])
    assert code == EXIT_FAIL and json.loads(out)["results"][0]["holds"] is False
    code, out, _ = run(["audit", "--checks", "heavy-edge", "--fixture", "heavy-terminal-edge"])
    heavy = json.loads(out)["results"][0]
    assert code == EXIT_OK and heavy["holds"] is True
    assert heavy["details"]["violations"] and not any(v["applicable"] for v in heavy["details"]["violations"])
    assert run(["audit", "--fixture", "nope"])[0] == EXIT_USAGE


def test_audit_formula(run):
    code, out, err = run(["audit", "--checks", "cycle,bundle"], to_json(gen_formula(0, 2)))
    assert code == EXIT_OK
    assert all(r["holds"] for r in json.loads(out)["results"]) and "bundle holds" in err


def test_export_dot(run, tmp_path):
    g = MultiGraph.build([0, 1, 2], [(0, 0, 1), (1, 1, 2)])
    text = instance_to_json(Instance(g, (0, 2)))
    cut = tmp_path / "cut.json"
    cut.write_text("[1]")
    code, out, _ = run(["export-dot", "--highlight-cut", str(cut)], text)
    assert code == EXIT_OK and out.startswith("graph") and "box" in out and "green" in out


def test_bad_subcommand(run):
    assert run(["frobnicate"])[0] == EXIT_USAGE


def test_console_script_pipeline():
    gen = subprocess.run([sys.executable, "-m", "mwcut.cli", "gen", "--seed", "1", "--n", "2"],
                         capture_output=True, text=True, check=True)
    red = subprocess.run([sys.executable, "-m", "mwcut.cli", "reduce", "--target", "weighted"],
                         input=gen.stdout, capture_output=True, text=True, check=True)
    sol = subprocess.run([sys.executable, "-m", "mwcut.cli", "solve", "--solver", "bnb", "--budget", "20"],
                         input=red.stdout, capture_output=True, text=True)
    assert sol.returncode == 0 and json.loads(sol.stdout)["status"] == "feasible"
