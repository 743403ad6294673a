"""3-CNF formulas and their compilation into a <1,2>-weighted bipartite digraph.

Vertex names used in compiled graphs::

    x<i>, nx<i>        variable vertices (literal x_i and its negation)
    y<i>, ny<i>        variable coordinating vertices
    z<i>_1, z<i>_2     variable coordinating vertices
    Cl<j>              clause vertex
    v<j>_<k>, u<j>_<k> clause coordinating vertices for the k-th literal of clause j
    a                  the hub vertex

Row part: ``y, ny, z_1`` per variable, then ``Cl, u_1..u_3`` per clause.
Column part: ``x, nx, z_2`` per variable, then ``v_1..v_3`` per clause, then ``a``.
Satisfying assignments map to undominated ``(1, m+n)`` out-regular sets and back.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Collection, Iterator, Sequence

from .errors import BudgetExhausted, InvalidArgument, ParseError, WitnessError
from .graph_model import WeightedBipartiteDigraph, diagnose

Literal = tuple[int, bool]  # (1-based variable, positive?)

MAX_BRUTE_FORCE_VARS = 25


@dataclass(frozen=True)
class CnfFormula:
    num_vars: int
    clauses: tuple[tuple[Literal, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "clauses", tuple(tuple(c) for c in self.clauses))
        if self.num_vars < 1:
            raise InvalidArgument("need at least one variable")
        for clause in self.clauses:
            if not clause:
                raise InvalidArgument("empty clause")
            for var, _ in clause:
                if not 1 <= var <= self.num_vars:
                    raise InvalidArgument(f"variable {var} out of range 1..{self.num_vars}")

    @classmethod
    def from_ints(cls, num_vars: int, clauses: Sequence[Sequence[int]]) -> CnfFormula:
        """Build from DIMACS-style signed integers, e.g. ``[[1, -2, 3]]``."""
        return cls(num_vars, tuple(tuple((abs(x), x > 0) for x in c) for c in clauses))

    @property
    def num_clauses(self) -> int:
        return len(self.clauses)

    def as_ints(self) -> list[list[int]]:
        return [[v if pos else -v for v, pos in c] for c in self.clauses]

    def evaluate(self, xi: Sequence[bool]) -> bool:
        return self.first_unsatisfied(xi) is None

    def first_unsatisfied(self, xi: Sequence[bool]) -> int | None:
        """0-based index of the first clause ``xi`` falsifies, or ``None``."""
        if len(xi) != self.num_vars:
            raise InvalidArgument(f"assignment has {len(xi)} bits, formula has {self.num_vars} variables")
        for j, clause in enumerate(self.clauses):
            if not any(xi[v - 1] == pos for v, pos in clause):
                return j
        return None

    def is_normalized(self) -> bool:
        if not self.clauses or any(len(c) != 3 for c in self.clauses):
            return False
        seen = {lit for c in self.clauses for lit in c}
        return all((v, pos) in seen for v in range(1, self.num_vars + 1) for pos in (True, False))

    def to_dimacs(self) -> str:
        lines = [f"p cnf {self.num_vars} {self.num_clauses}"]
        lines.extend(" ".join(map(str, c + [0])) for c in self.as_ints())
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class Assignment:
    bits: tuple[bool, ...]

    def __post_init__(self):
        object.__setattr__(self, "bits", tuple(bool(b) for b in self.bits))

    def __len__(self):
        return len(self.bits)

    def __getitem__(self, i):
        return self.bits[i]

    def __iter__(self):
        return iter(self.bits)


def literal_name(lit: Literal) -> str:
    v, pos = lit
    return f"x{v}" if pos else f"nx{v}"


def format_literal(lit: Literal) -> str:
    v, pos = lit
    return f"x{v}" if pos else f"~x{v}"


# -- DIMACS ------------------------------------------------------------------


def parse_dimacs(text: str) -> CnfFormula:
    """Parse DIMACS CNF. Clauses may span lines; each ends with ``0``."""
    num_vars = num_clauses = None
    clauses: list[list[int]] = []
    current: list[int] = []
    current_line = 0
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("c") or line.startswith("%"):
            continue
        if line.startswith("p"):
            fields = line.split()
            if num_vars is not None:
                raise ParseError("duplicate header", lineno)
            if len(fields) != 4 or fields[0] != "p" or fields[1] != "cnf":
                raise ParseError(f"malformed header {line!r}", lineno)
            try:
                num_vars, num_clauses = int(fields[2]), int(fields[3])
            except ValueError:
                raise ParseError(f"malformed header {line!r}", lineno) from None
            if num_vars < 1 or num_clauses < 0:
                raise ParseError(f"malformed header {line!r}", lineno)
            continue
        if num_vars is None:
            raise ParseError("clause before 'p cnf' header", lineno)
        for tok in line.split():
            try:
                lit = int(tok)
            except ValueError:
                raise ParseError(f"non-integer token {tok!r}", lineno) from None
            if lit == 0:
                if not current:
                    raise ParseError("empty clause", lineno)
                clauses.append(current)
                current = []
                continue
            if abs(lit) > num_vars:
                raise ParseError(f"variable {abs(lit)} out of range 1..{num_vars}", lineno)
            if not current:
                current_line = lineno
            current.append(lit)
    if num_vars is None:
        raise ParseError("missing 'p cnf' header")
    if current:
        raise ParseError("clause not terminated by 0", current_line)
    if len(clauses) != num_clauses:
        raise ParseError(f"header announces {num_clauses} clauses, found {len(clauses)}")
    return CnfFormula.from_ints(num_vars, clauses)


# -- normalization -----------------------------------------------------------


@dataclass
class NormalizationReport:
    padded: list[tuple[int, tuple[Literal, ...], tuple[Literal, ...]]] = field(default_factory=list)
    fresh: list[tuple[int, int, tuple[int, int]]] = field(default_factory=list)

    @property
    def unchanged(self) -> bool:
        return not self.padded and not self.fresh

    def to_text(self) -> str:
        if self.unchanged:
            return "normalization: unchanged\n"
        lines = []
        for j, before, after in self.padded:
            lines.append(
                f"pad clause {j + 1}: ({' | '.join(map(format_literal, before))})"
                f" -> ({' | '.join(map(format_literal, after))})"
            )
        for var, t, (j1, j2) in self.fresh:
            lines.append(f"cover x{var}: fresh variable x{t}, tautological clauses {j1 + 1} and {j2 + 1}")
        return "\n".join(lines) + "\n"


def normalize(formula: CnfFormula) -> tuple[CnfFormula, NormalizationReport]:
    """Bring a CNF formula into the shape the reduction expects.

    Every clause gets exactly three literals (short ones repeat their first
    literal) and every literal occurs somewhere: a variable missing one of its
    literals gets a fresh variable ``t`` plus the clauses ``(x | ~x | t)`` and
    ``(x | ~x | ~t)``, which are tautologies, so satisfiability is unchanged.
    """
    if not formula.clauses:
        raise InvalidArgument("formula has no clauses")
    report = NormalizationReport()
    clauses = []
    for j, clause in enumerate(formula.clauses):
        if len(clause) > 3:
            raise InvalidArgument(f"clause {j + 1} has {len(clause)} literals; not a 3-CNF")
        if len(clause) < 3:
            padded = clause + (clause[0],) * (3 - len(clause))
            report.padded.append((j, clause, padded))
            clause = padded
        clauses.append(clause)
    seen = {lit for c in clauses for lit in c}
    num_vars = formula.num_vars
    for var in range(1, formula.num_vars + 1):
        if (var, True) in seen and (var, False) in seen:
            continue
        num_vars += 1
        t = num_vars
        clauses.append(((var, True), (var, False), (t, True)))
        clauses.append(((var, True), (var, False), (t, False)))
        report.fresh.append((var, t, (len(clauses) - 2, len(clauses) - 1)))
    return CnfFormula(num_vars, tuple(clauses)), report


# -- brute force oracle ------------------------------------------------------


def iter_satisfying(formula: CnfFormula) -> Iterator[Assignment]:
    """Satisfying assignments in binary order, ``x1`` as the most significant bit."""
    if formula.num_vars > MAX_BRUTE_FORCE_VARS:
        raise BudgetExhausted(2**MAX_BRUTE_FORCE_VARS, "brute-force SAT")
    for bits in itertools.product((False, True), repeat=formula.num_vars):
        if formula.evaluate(bits):
            yield Assignment(bits)


def brute_force_sat(formula: CnfFormula) -> Assignment | None:
    return next(iter_satisfying(formula), None)


# -- compilation -------------------------------------------------------------


@dataclass(frozen=True)
class ReductionGraph:
    graph: WeightedBipartiteDigraph
    roles: dict[str, str]
    formula: CnfFormula

    @property
    def n(self) -> int:
        return self.formula.num_vars

    @property
    def m(self) -> int:
        return self.formula.num_clauses

    @property
    def heavy_weight(self) -> int:
        return self.n + self.m

    def literal_vertex(self, j: int, k: int) -> str:
        """Target of ``u<j>_<k>`` (1-based clause and position)."""
        return literal_name(self.formula.clauses[j - 1][k - 1])


def variable_vertices(i: int) -> dict[str, str]:
    return {
        "x": f"x{i}", "nx": f"nx{i}", "y": f"y{i}", "ny": f"ny{i}",
        "z1": f"z{i}_1", "z2": f"z{i}_2",
    }


def build_reduction_graph(formula: CnfFormula) -> ReductionGraph:
    if not formula.is_normalized():
        raise InvalidArgument("formula must be normalized (3 literals per clause, every literal used)")
    n, m = formula.num_vars, formula.num_clauses
    heavy = Fraction(m + n)
    one = Fraction(1)
    rows, cols, roles = [], [], {}

    def add(part, name, role):
        part.append(name)
        roles[name] = role

    for i in range(1, n + 1):
        add(rows, f"y{i}", f"y_{i}")
        add(rows, f"ny{i}", f"~y_{i}")
        add(rows, f"z{i}_1", f"z_{i}1")
    for j in range(1, m + 1):
        add(rows, f"Cl{j}", f"C_{j}")
        for k in (1, 2, 3):
            add(rows, f"u{j}_{k}", f"u_{j}{k}")
    for i in range(1, n + 1):
        add(cols, f"x{i}", f"x_{i}")
        add(cols, f"nx{i}", f"~x_{i}")
        add(cols, f"z{i}_2", f"z_{i}2")
    for j in range(1, m + 1):
        for k in (1, 2, 3):
            add(cols, f"v{j}_{k}", f"v_{j}{k}")
    add(cols, "a", "a")

    arcs = {}
    for j, clause in enumerate(formula.clauses, 1):
        for k, lit in enumerate(clause, 1):
            arcs[(f"Cl{j}", f"v{j}_{k}")] = one
            arcs[(f"v{j}_{k}", f"u{j}_{k}")] = heavy
            arcs[(f"u{j}_{k}", literal_name(lit))] = one
        arcs[("a", f"Cl{j}")] = one
    for i in range(1, n + 1):
        arcs[(f"x{i}", f"y{i}")] = heavy
        arcs[(f"y{i}", "a")] = one
        arcs[(f"nx{i}", f"ny{i}")] = heavy
        arcs[(f"ny{i}", "a")] = one
        arcs[("a", f"z{i}_1")] = one
        arcs[(f"z{i}_1", f"z{i}_2")] = one
        arcs[(f"z{i}_2", f"y{i}")] = heavy
        arcs[(f"z{i}_2", f"ny{i}")] = heavy
    graph = WeightedBipartiteDigraph(tuple(rows), tuple(cols), arcs)
    return ReductionGraph(graph, roles, formula)


def variable_gadget_vertices(rg: ReductionGraph, i: int) -> list[str]:
    """The seven vertices of the gadget for variable ``i``."""
    vs = variable_vertices(i)
    return ["a", vs["z1"], vs["z2"], vs["x"], vs["nx"], vs["y"], vs["ny"]]


def clause_gadget_vertices(rg: ReductionGraph, j: int) -> list[str]:
    """Hub, clause vertex, its coordinating vertices and the literal vertices it reaches."""
    out = ["a", f"Cl{j}"]
    out += [f"v{j}_{k}" for k in (1, 2, 3)]
    out += [f"u{j}_{k}" for k in (1, 2, 3)]
    out += list(dict.fromkeys(rg.literal_vertex(j, k) for k in (1, 2, 3)))
    return out


# -- witness translation -----------------------------------------------------


def assignment_to_witness(rg: ReductionGraph, xi: Assignment | Sequence[bool]) -> frozenset[str]:
    """Vertex set selected by a satisfying assignment.

    Clause ``j`` contributes ``v<j>_<k>, u<j>_<k>`` for the least ``k`` whose
    literal is true.
    """
    xi = tuple(bool(b) for b in xi)
    bad = rg.formula.first_unsatisfied(xi)
    if bad is not None:
        clause = " | ".join(map(format_literal, rg.formula.clauses[bad]))
        raise WitnessError(f"assignment falsifies clause {bad + 1}: ({clause})")
    chosen = {"a"}
    for i in range(1, rg.n + 1):
        chosen |= {f"z{i}_1", f"z{i}_2"}
        chosen |= {f"x{i}", f"y{i}"} if xi[i - 1] else {f"nx{i}", f"ny{i}"}
    for j, clause in enumerate(rg.formula.clauses, 1):
        chosen.add(f"Cl{j}")
        k = next(k for k, (v, pos) in enumerate(clause, 1) if xi[v - 1] == pos)
        chosen |= {f"v{j}_{k}", f"u{j}_{k}"}
    return frozenset(chosen)


def witness_to_assignment(rg: ReductionGraph, subset: Collection[str]) -> Assignment:
    """Read an assignment off an undominated out-regular set: ``x_i`` true iff ``x<i>`` is selected."""
    _, problems = diagnose(rg.graph, subset)
    if problems:
        raise InvalidArgument("not an undominated out-regular set: " + "; ".join(problems))
    members = set(subset)
    xi = Assignment(tuple(f"x{i}" in members for i in range(1, rg.n + 1)))
    bad = rg.formula.first_unsatisfied(xi.bits)
    if bad is not None:
        raise WitnessError(f"internal inconsistency: extracted assignment falsifies clause {bad + 1}")
    return xi
