from __future__ import annotations

import os
from dataclasses import dataclass, field
from fractions import Fraction

from ..graph import CutSolution

# Size guards for the exhaustive oracles. MWCUT_FORCE=1 in the environment (or
# force=True) turns a guard violation into a warning.
SUBSET_MAX_EDGES = 22
LABELING_MAX_FREE_VERTICES = 12
NODE_MAX_SUBSETS = 2_000_000
NODE_ALL_OPTIMA_MAX_CANDIDATES = 20
ENUM_MAX_OPTIMA = 200_000
BNB_MAX_NODES = 5_000_000


def forced(force: bool = False) -> bool:
    return force or os.environ.get("MWCUT_FORCE", "") not in ("", "0")


@dataclass
class SolveReport:
    optimum: Fraction | None  # None: no feasible solution (or none within budget)
    witness: CutSolution | None
    nodes_explored: int = 0
    bound_trace: list[tuple[int, Fraction, str]] = field(default_factory=list)
    method: str = ""
    budget: Fraction | None = None

    @property
    def feasible(self) -> bool:
        return self.optimum is not None

    def as_dict(self) -> dict:
        return {
            "method": self.method,
            "optimum": None if self.optimum is None else str(self.optimum),
            "budget": None if self.budget is None else str(self.budget),
            "status": "optimum" if self.budget is None and self.feasible
            else "feasible" if self.feasible else "budget-infeasible" if self.budget is not None
            else "no-solution",
            "witness": None if self.witness is None else {
                "kind": self.witness.kind,
                "items": self.witness.sorted_items(),
                "weight": str(self.witness.weight),
            },
            "nodes_explored": self.nodes_explored,
            "bound_trace": [[d, str(lb), s] for d, lb, s in self.bound_trace],
        }
