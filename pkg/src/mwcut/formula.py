"""2P1N-3SAT formulas: model, validation, brute-force SAT, seeded generator, DIMACS/JSON io.

Literals use DIMACS conventions: ``+i`` is x_i, ``-i`` is its negation, variables are 1-based.
"""

from __future__ import annotations

import hashlib
import itertools
import json
import random
from dataclasses import dataclass, field

from .errors import FormulaError, SizeGuardError

BRUTE_FORCE_MAX_VARS = 25


@dataclass(frozen=True)
class Formula:
    n: int
    clauses: tuple[tuple[int, ...], ...]
    planar_certified: bool = False

    def __post_init__(self):
        object.__setattr__(self, "clauses", tuple(tuple(c) for c in self.clauses))

    @property
    def m(self) -> int:
        return len(self.clauses)

    @property
    def budget(self) -> int:
        return 7 * self.n + 2 * self.m

    def occurrences(self, var: int) -> list[tuple[int, int, bool]]:
        """``(clause index, position, positive?)`` for each occurrence of ``var`` in clause order."""
        out = []
        for j, c in enumerate(self.clauses):
            for r, lit in enumerate(c):
                if abs(lit) == var:
                    out.append((j, r, lit > 0))
        return out

    def satisfied_by(self, a: Assignment) -> bool:
        return all(any(a.value(lit) for lit in c) for c in self.clauses)

    def digest(self) -> str:
        return hashlib.sha256(to_json(self, planar=False).encode()).hexdigest()[:16]

    def incidence_edges(self) -> list[tuple[int, int]]:
        """Edges of the variable-clause incidence graph; variables 0..n-1, clauses n..n+m-1."""
        return [(abs(lit) - 1, self.n + j) for j, c in enumerate(self.clauses) for lit in c]


@dataclass(frozen=True)
class Assignment:
    values: tuple[bool, ...]  # values[i] is x_{i+1}

    @classmethod
    def from_map(cls, n: int, m: dict[int, bool]) -> Assignment:
        missing = [i for i in range(1, n + 1) if i not in m]
        if missing:
            raise FormulaError(f"assignment is not total, missing x{missing[0]}")
        return cls(tuple(bool(m[i]) for i in range(1, n + 1)))

    def value(self, lit: int) -> bool:
        v = self.values[abs(lit) - 1]
        return v if lit > 0 else not v

    def as_map(self) -> dict[int, bool]:
        return {i + 1: v for i, v in enumerate(self.values)}


@dataclass
class FormulaVerdict:
    ok: bool
    rule: str | None = None
    detail: str = ""
    warnings: list[str] = field(default_factory=list)

    def __bool__(self):
        return self.ok

    def as_dict(self) -> dict:
        return {"ok": self.ok, "rule": self.rule, "detail": self.detail, "warnings": self.warnings}


def validate_formula(f: Formula) -> FormulaVerdict:
    warnings = []
    n_inc = f.n + f.m
    if n_inc >= 3 and len(f.incidence_edges()) > 3 * n_inc - 6:
        warnings.append("incidence graph exceeds the Euler bound m <= 3n-6, so it cannot be planar")

    def fail(rule, detail):
        return FormulaVerdict(False, rule, detail, warnings)

    for j, c in enumerate(f.clauses):
        if len(c) not in (2, 3):
            return fail("clause-size", f"clause {j + 1} has {len(c)} literals")
        for lit in c:
            if lit == 0 or abs(lit) > f.n:
                return fail("literal-range", f"clause {j + 1} has literal {lit} outside 1..{f.n}")
        if len(set(c)) != len(c):
            return fail("duplicate-literal", f"clause {j + 1} repeats a literal")
        if len({abs(lit) for lit in c}) != len(c):
            return fail("distinct-variables", f"clause {j + 1} mentions a variable twice")
    for i in range(1, f.n + 1):
        occ = f.occurrences(i)
        pos = sum(1 for _, _, p in occ if p)
        neg = len(occ) - pos
        if pos != 2 or neg != 1:
            return fail("occurrence", f"x{i} occurs {pos} times positively and {neg} times negatively")
    for i in range(1, f.n + 1):
        small = sum(1 for j, _, _ in f.occurrences(i) if len(f.clauses[j]) == 2)
        if small < 2:
            return fail("promise", f"x{i} occurs in only {small} clauses of size 2")
    return FormulaVerdict(True, warnings=warnings)


def brute_force_sat(f: Formula, force: bool = False) -> Assignment | None:
    """Lexicographically first satisfying assignment (False < True, x1 most significant)."""
    if f.n > BRUTE_FORCE_MAX_VARS and not force:
        raise SizeGuardError(f"instance too large for oracle: n={f.n} > {BRUTE_FORCE_MAX_VARS}")
    for bits in itertools.product((False, True), repeat=f.n):
        if all(any(bits[abs(l) - 1] == (l > 0) for l in c) for c in f.clauses):
            return Assignment(bits)
    return None


def all_satisfying(f: Formula) -> list[Assignment]:
    if f.n > BRUTE_FORCE_MAX_VARS:
        raise SizeGuardError(f"instance too large for oracle: n={f.n}")
    return [
        Assignment(bits)
        for bits in itertools.product((False, True), repeat=f.n)
        if all(any(bits[abs(l) - 1] == (l > 0) for l in c) for c in f.clauses)
    ]


# --- generator -------------------------------------------------------------


def _sides(clauses) -> list[int] | None:
    """Put each clause above (0) or below (1) the variable line without crossings.

    Variables sit on a line in index order and every clause spans at most three
    consecutive positions. Two clauses on one side conflict when their spans
    interleave, or when both are size 3 over the same span (the middle leg of
    one blocks the other). Returns None if the conflict graph is not bipartite.
    """
    spans = [(min(abs(l) for l in c), max(abs(l) for l in c), len(c)) for c in clauses]
    m = len(spans)
    conflict = [[] for _ in range(m)]
    for a in range(m):
        a1, a2, ka = spans[a]
        for b in range(a + 1, m):
            b1, b2, kb = spans[b]
            cross = a1 < b1 < a2 < b2 or b1 < a1 < b2 < a2
            stacked_triples = ka == kb == 3 and (a1, a2) == (b1, b2)
            if cross or stacked_triples:
                conflict[a].append(b)
                conflict[b].append(a)
    side = [-1] * m
    for s in range(m):
        if side[s] != -1:
            continue
        side[s] = 0
        stack = [s]
        while stack:
            x = stack.pop()
            for y in conflict[x]:
                if side[y] == -1:
                    side[y] = 1 - side[x]
                    stack.append(y)
                elif side[y] == side[x]:
                    return None
    return side


def _attempt(rng: random.Random, n: int, p_triple: float):
    pos = {i: 2 for i in range(1, n + 1)}
    neg = {i: 1 for i in range(1, n + 1)}

    def left(i):
        return pos[i] + neg[i] if 1 <= i <= n else 0

    def take(i):
        opts = ["+"] * pos[i] + ["-"] * neg[i]
        s = rng.choice(opts)
        if s == "+":
            pos[i] -= 1
            return i
        neg[i] -= 1
        return -i

    clauses = []
    for i in range(1, n + 1):
        while left(i):
            shapes = []
            if left(i + 1):
                shapes.append((i + 1,))
            if left(i + 2):
                shapes.append((i + 2,))
            if left(i + 1) and left(i + 2) and rng.random() < p_triple:
                shapes = [(i + 1, i + 2)]
            if not shapes:
                return None
            partners = rng.choice(shapes)
            clauses.append(tuple(take(x) for x in (i, *partners)))
    return clauses


def gen_formula(seed: int, n: int, p_triple: float = 0.25, max_attempts: int = 100_000) -> Formula:
    """Seeded valid formula with a planar incidence graph.

    Variables lie on a path; each clause mixes occurrences of variables at most
    two positions apart, and the clauses are split above/below the path so the
    incidence graph has an explicit planar drawing.
    """
    if n < 2:
        raise FormulaError("generator needs n >= 2")
    rng = random.Random(f"2p1n:{seed}:{n}")
    for _ in range(max_attempts):
        clauses = _attempt(rng, n, p_triple)
        if clauses is None or _sides(clauses) is None:
            continue
        rng.shuffle(clauses)
        f = Formula(n, tuple(clauses), planar_certified=True)
        if validate_formula(f):
            return f
    raise FormulaError(f"no valid formula found for seed={seed}, n={n}")


def planar_sides(f: Formula) -> list[int] | None:
    return _sides(f.clauses)


# --- io ----------------------------------------------------------------------


def parse_dimacs(text: str) -> Formula:
    n = None
    clauses = []
    cur: list[int] = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("c") or line.startswith("%"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) < 4 or parts[1] != "cnf":
                raise FormulaError(f"bad problem line: {line!r}")
            n = int(parts[2])
            continue
        for tok in line.split():
            lit = int(tok)
            if lit == 0:
                clauses.append(tuple(cur))
                cur = []
            else:
                cur.append(lit)
    if cur:
        clauses.append(tuple(cur))
    if n is None:
        n = max((abs(l) for c in clauses for l in c), default=0)
    return Formula(n, tuple(clauses))


def to_dimacs(f: Formula) -> str:
    lines = [f"p cnf {f.n} {f.m}"]
    lines += [" ".join(str(l) for l in c) + " 0" for c in f.clauses]
    return "\n".join(lines) + "\n"


def to_obj(f: Formula, planar: bool = True) -> dict:
    obj = {"n": f.n, "clauses": [list(c) for c in f.clauses]}
    if planar:
        obj["planar_certified"] = f.planar_certified
    return obj


def to_json(f: Formula, planar: bool = True) -> str:
    return json.dumps(to_obj(f, planar), sort_keys=True, indent=2) + "\n"


def from_obj(obj: dict) -> Formula:
    try:
        return Formula(int(obj["n"]), tuple(tuple(int(l) for l in c) for c in obj["clauses"]),
                       bool(obj.get("planar_certified", False)))
    except (KeyError, TypeError, ValueError) as exc:
        raise FormulaError(f"malformed formula JSON: {exc}") from exc


def from_json(text: str) -> Formula:
    return from_obj(json.loads(text))


def load(text: str) -> Formula:
    """Accept either formula JSON or DIMACS CNF."""
    s = text.lstrip()
    if s.startswith("{"):
        return from_json(text)
    return parse_dimacs(text)
