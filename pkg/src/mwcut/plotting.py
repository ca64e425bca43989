"""Report figures and the tab-delimited stage table for the ``report`` command."""

from __future__ import annotations

import csv
from fractions import Fraction
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
from matplotlib.patches import Patch  # noqa: E402

STYLE = {
    "font.size": 9,
    "axes.labelsize": 9,
    "axes.titlesize": 10,
    "legend.fontsize": 8,
    "xtick.labelsize": 7,
    "ytick.labelsize": 8,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "figure.dpi": 110,
    "savefig.bbox": "tight",
}

TSV_COLUMNS = ("formula", "n", "m", "sat", "stage", "vertices", "edges", "max_degree", "budget",
               "verdict", "optimum", "method", "matches", "seconds")

SAT_COLOURS = {True: "#2a7f62", False: "#b8432f"}


def _new(width=6.0, height=3.2):
    plt.rcParams.update(STYLE)
    return plt.subplots(figsize=(width, height))


def _save(fig, path: Path) -> Path:
    fig.savefig(path)
    plt.close(fig)
    return path


def _label(rep) -> str:
    return f"n{rep.n}:{rep.digest[:6]}"


def write_tsv(reports, path: Path) -> Path:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, delimiter="\t", lineterminator="\n")
        w.writerow(TSV_COLUMNS)
        for rep in reports:
            for st in rep.stages:
                w.writerow([rep.digest, rep.n, rep.m, int(rep.sat), st.stage, st.stats.get("vertices", ""),
                            st.stats.get("edges", ""), st.stats.get("max_degree", ""), st.budget or "",
                            st.verdict, st.optimum or "", st.method,
                            "" if st.matches is None else int(st.matches), st.seconds])
    return path


def plot_budget_gap(reports, path: Path) -> Path:
    """Weighted optimum minus 7n+2m per formula: zero bars for satisfiable, positive for the rest."""
    rows = [(r, next((s for s in r.stages if s.stage == "weighted" and s.optimum is not None), None))
            for r in reports]
    rows = [(r, s) for r, s in rows if s is not None]
    fig, ax = _new()
    xs = range(len(rows))
    gaps = [float(Fraction(s.optimum) - r.budget) for r, s in rows]
    ax.bar(xs, gaps, color=[SAT_COLOURS[r.sat] for r, _ in rows], width=0.7)
    ax.scatter(xs, gaps, color=[SAT_COLOURS[r.sat] for r, _ in rows], s=12, zorder=3)
    ax.axhline(0, color="black", lw=0.8)
    ax.set_xticks(list(xs), [_label(r) for r, _ in rows], rotation=60, ha="right")
    ax.set_ylabel("optimum - (7n+2m)")
    ax.set_title("weighted stage: optimum against the budget")
    ax.legend(handles=[Patch(color=SAT_COLOURS[True], label="satisfiable"),
                       Patch(color=SAT_COLOURS[False], label="unsatisfiable")], frameon=False)
    return _save(fig, path)


def plot_stage_sizes(reports, path: Path) -> Path:
    """Vertex counts per stage on a log scale."""
    stages = [s.stage for s in reports[0].stages] if reports else []
    fig, ax = _new()
    width = 0.8 / max(1, len(stages))
    for i, name in enumerate(stages):
        ys = [next((s.stats.get("vertices", 0) for s in r.stages if s.stage == name), 0) for r in reports]
        ax.bar([x + i * width for x in range(len(reports))], ys, width=width, label=name)
    ax.set_yscale("log")
    ax.set_xticks([x + 0.4 - width / 2 for x in range(len(reports))], [_label(r) for r in reports],
                  rotation=60, ha="right")
    ax.set_ylabel("vertices")
    ax.set_title("instance size per stage")
    ax.legend(frameon=False, ncol=3)
    return _save(fig, path)


def plot_stage_times(reports, path: Path) -> Path:
    stages = [s.stage for s in reports[0].stages] if reports else []
    fig, ax = _new()
    for name in stages:
        ys = [next((s.seconds for s in r.stages if s.stage == name), 0) for r in reports]
        ax.plot(range(len(reports)), ys, marker="o", ms=3, lw=1, label=name)
    ax.set_xticks(list(range(len(reports))), [_label(r) for r in reports], rotation=60, ha="right")
    ax.set_ylabel("seconds")
    ax.set_yscale("symlog", linthresh=0.01)
    ax.set_title("time per stage")
    ax.legend(frameon=False, ncol=3)
    return _save(fig, path)


def plot_bound_trace(trace, budget, path: Path, title: str = "branch-and-bound lower bounds") -> Path:
    """Recorded lower bound per visited node, with pruned nodes marked."""
    fig, ax = _new()
    pts = [(i, float(lb), status) for i, (_, lb, status) in enumerate(trace) if lb is not None]
    for status, marker in (("branch", "."), ("split", "s"), ("leaf", "*"), ("pruned", "x"), ("dominated", "+")):
        sel = [(i, lb) for i, lb, s in pts if s == status]
        if sel:
            ax.scatter([i for i, _ in sel], [lb for _, lb in sel], marker=marker, s=14, label=status)
    if budget is not None:
        ax.axhline(float(budget), color="black", lw=0.8, ls="--", label="budget")
    ax.set_xlabel("node (visit order)")
    ax.set_ylabel("lower bound")
    ax.set_title(title)
    ax.legend(frameon=False, ncol=3)
    return _save(fig, path)
