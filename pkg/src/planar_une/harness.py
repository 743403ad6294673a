"""End-to-end verification pipelines and randomized dual-oracle checks.

Every verdict is backed by two computations that do not share code paths:
game-side support enumeration against graph-side subset checking, the SAT
brute force against the witness translations, the exact finder against the
no-pruning oracle.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from typing import Sequence

import numpy as np

from .core_game import (
    BimatrixGame,
    enumerate_uniform_equilibria,
    format_game,
    is_nash_equilibrium,
    support_pair_mask,
    to_fraction,
    uniform_strategy,
    weight_class_profile,
)
from .errors import BudgetExhausted
from .graph_model import (
    WeightedBipartiteDigraph,
    enumerate_undominated_out_regular,
    find_undominated_out_regular,
    game_to_graph,
    graph_to_game,
    is_planar,
    is_strongly_connected,
    is_undominated_out_regular,
    out_weight_into,
    witness_for,
)
from .oracles import count_polyline_crossings, naive_witness_masks
from .planarizer import insert_gadgets, lift_witness, project_witness
from .sat_reduction import (
    CnfFormula,
    assignment_to_witness,
    build_reduction_graph,
    iter_satisfying,
    normalize,
    parse_dimacs,
    witness_to_assignment,
)

PASS, FAIL, SKIPPED = "pass", "fail", "skipped"
DEFAULT_BUDGET = 1_000_000
NAIVE_ORACLE_MAX_VERTICES = 24


@dataclass
class VerificationReport:
    instance: str
    stages: dict[str, str] = field(default_factory=dict)
    details: dict[str, str] = field(default_factory=dict)
    counterexample: str | None = None

    def record(self, stage: str, ok: bool | None, detail: str = "") -> bool:
        """Record a stage outcome; ``ok=None`` marks it skipped."""
        self.stages[stage] = SKIPPED if ok is None else PASS if ok else FAIL
        if detail:
            self.details[stage] = detail
        return bool(ok)

    @property
    def passed(self) -> bool:
        return all(v != FAIL for v in self.stages.values())

    def to_text(self) -> str:
        lines = [f"instance: {self.instance}", f"verdict: {'PASS' if self.passed else 'FAIL'}"]
        for stage, outcome in self.stages.items():
            detail = self.details.get(stage)
            lines.append(f"  {stage:<18} {outcome}" + (f"  ({detail})" if detail else ""))
        if self.counterexample:
            lines.append("counterexample:")
            lines.extend("  " + line for line in self.counterexample.splitlines())
        return "\n".join(lines) + "\n"

    def to_kv(self) -> str:
        lines = [f"instance={self.instance}", f"verdict={'pass' if self.passed else 'fail'}"]
        lines.extend(f"stage.{k}={v}" for k, v in self.stages.items())
        lines.extend(f"detail.{k}={v}" for k, v in self.details.items())
        return "\n".join(lines) + "\n"


# -- random games ------------------------------------------------------------


@dataclass(frozen=True)
class RandomGameSpec:
    rows: int
    cols: int
    weights_row: tuple[Fraction, ...] = (Fraction(1),)
    weights_col: tuple[Fraction, ...] = (Fraction(1),)
    density: float = 0.5
    seed: int = 0
    min_rows: int | None = None
    min_cols: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "weights_row", tuple(to_fraction(w) for w in self.weights_row))
        object.__setattr__(self, "weights_col", tuple(to_fraction(w) for w in self.weights_col))
        if not 0 < self.density <= 1:
            raise ValueError("density must lie in (0, 1]")
        if any(w <= 0 for w in self.weights_row + self.weights_col) or not self.weights_row or not self.weights_col:
            raise ValueError("weight classes must be non-empty sets of positive rationals")

    def with_seed(self, seed) -> RandomGameSpec:
        return RandomGameSpec(self.rows, self.cols, self.weights_row, self.weights_col,
                              self.density, seed, self.min_rows, self.min_cols)


def generate_random_game(spec: RandomGameSpec) -> BimatrixGame:
    """Reproducible random game; sizes are drawn from ``[min, max]`` (default: exactly the max)."""
    rng = np.random.default_rng(spec.seed)
    lo_r = spec.rows if spec.min_rows is None else spec.min_rows
    lo_c = spec.cols if spec.min_cols is None else spec.min_cols
    nr = int(rng.integers(lo_r, spec.rows + 1))
    nc = int(rng.integers(lo_c, spec.cols + 1))

    def draw(weights):
        while True:
            positive = rng.random((nr, nc)) < spec.density
            picks = rng.integers(0, len(weights), size=(nr, nc))
            if positive.any():
                return [[weights[picks[i, j]] if positive[i, j] else Fraction(0) for j in range(nc)] for i in range(nr)]

    mr = draw(spec.weights_row)
    mc = draw(spec.weights_col)
    return BimatrixGame.from_matrices(mr, mc)


def positive_outweight_violations(graph: WeightedBipartiteDigraph, subset) -> list[str]:
    members = set(subset)
    return [v for v in members if out_weight_into(graph, v, members) <= 0]


def crosscheck_equivalence(spec: RandomGameSpec, trials: int) -> VerificationReport:
    """Compare game-side and graph-side enumeration on ``trials`` random games.

    Trial ``t`` uses seed ``(spec.seed, t)``. Also checks that the pruned finder
    returns the least graph-side witness, and that on strongly connected
    graphs every witness member sends positive weight into the witness.
    """
    report = VerificationReport(f"random games {spec.min_rows or spec.rows}..{spec.rows} x "
                                f"{spec.min_cols or spec.cols}..{spec.cols}, seed {spec.seed}, {trials} trials")
    counts = {"equivalence": 0, "finder": 0, "lemma": 0}
    strong = witnesses = 0
    for t in range(trials):
        game = generate_random_game(spec.with_seed([spec.seed, t]))
        graph = game_to_graph(game)
        game_side = [support_pair_mask(game, p) for p in enumerate_uniform_equilibria(game)]
        graph_side = [graph.mask(s) for s in enumerate_undominated_out_regular(graph)]
        witnesses += len(graph_side)
        found = find_undominated_out_regular(graph)
        found_mask = graph.mask(found.vertices) if found else None
        bad = []
        if game_side != graph_side:
            bad.append("equivalence")
        if found_mask != (graph_side[0] if graph_side else None):
            bad.append("finder")
        if is_strongly_connected(graph):
            strong += 1
            if any(positive_outweight_violations(graph, graph.from_mask(m)) for m in graph_side):
                bad.append("lemma")
        for stage in bad:
            counts[stage] += 1
        if bad and report.counterexample is None:
            report.counterexample = (f"trial {t} ({', '.join(bad)})\n{format_game(game)}"
                                     f"game-side masks {game_side}\ngraph-side masks {graph_side}\nfinder {found_mask}")
    report.record("equivalence", counts["equivalence"] == 0, f"{trials} trials, {witnesses} witnesses")
    report.record("finder", counts["finder"] == 0)
    report.record("lemma", counts["lemma"] == 0, f"{strong} strongly connected")
    return report


# -- SAT pipeline --------------------------------------------------------------


def _uniform_ne(graph: WeightedBipartiteDigraph, game: BimatrixGame, subset) -> bool:
    members = set(subset)
    x_row = uniform_strategy("row", [r for r in graph.row_part if r in members])
    x_col = uniform_strategy("col", [c for c in graph.col_part if c in members])
    return is_nash_equilibrium(game, x_row, x_col)


def end_to_end(
    formula: CnfFormula,
    budget: int | None = DEFAULT_BUDGET,
    name: str = "formula",
    all_assignments: bool = False,
) -> VerificationReport:
    """Run the whole reduction on one formula and cross-check every stage.

    Satisfiable formulas go assignment -> witness on G_phi -> lift to H_phi ->
    project back -> assignment, with the uniform-equilibrium check on both
    compiled games. Unsatisfiable ones ask the finder (and, when small enough,
    the naive oracle) to confirm that G_phi has no witness.
    """
    report = VerificationReport(name)
    if not formula.is_normalized():
        formula, norm = normalize(formula)
        report.details["normalize"] = norm.to_text().strip().replace("\n", "; ")
    n, m = formula.num_vars, formula.num_clauses
    rg = build_reduction_graph(formula)
    g = rg.graph
    g_game = graph_to_game(g)
    profile = weight_class_profile(g_game)
    report.record(
        "structure",
        len(g.vertices) == 6 * n + 7 * m + 1
        and len(g.arcs) == 8 * n + 10 * m
        and profile.class_row == {1}
        and profile.class_col == {1, m + n}
        and is_strongly_connected(g),
        f"|V|={len(g.vertices)} |E|={len(g.arcs)} heavy={m + n}",
    )
    pr = insert_gadgets(rg)
    h = pr.graph
    proper, improper = count_polyline_crossings([a.polyline for a in pr.embedding.routed_arcs])
    report.record(
        "crossings",
        proper == len(pr.crossings) and improper == 0
        and len(h.vertices) - len(g.vertices) == (4 * (m + n) + 7) * len(pr.crossings),
        f"{len(pr.crossings)} crossings, oracle {proper}",
    )
    h_game = graph_to_game(h)
    h_profile = weight_class_profile(h_game)
    report.record("planarity", is_planar(h) and h_profile.class_row == {1} and h_profile.class_col == {1, m + n},
                  f"|V(H)|={len(h.vertices)}")

    try:
        assignments = list(iter_satisfying(formula)) if all_assignments else [
            a for a in [next(iter_satisfying(formula), None)] if a is not None]
    except BudgetExhausted:
        report.record("sat_oracle", None, "too many variables")
        return report
    satisfiable = bool(assignments)
    report.record("sat_oracle", True, "satisfiable" if satisfiable else "unsatisfiable")

    if satisfiable:
        ok = {k: True for k in ("witness_G", "nash_G", "lift", "nash_H", "project", "assignment")}
        for xi in assignments:
            s = assignment_to_witness(rg, xi)
            w = witness_for(g, s)
            good_g = w is not None and (w.alpha, w.beta) == (1, m + n) and _passes(g, s)
            ok["witness_G"] &= good_g
            ok["nash_G"] &= _uniform_ne(g, g_game, s)
            try:
                t = lift_witness(s, pr, verify=False)
            except Exception as exc:  # report content, not a crash
                ok["lift"] = False
                report.counterexample = report.counterexample or f"lift failed for {xi.bits}: {exc}"
                continue
            ok["lift"] &= _passes(h, t) and not positive_outweight_violations(h, t)
            ok["nash_H"] &= _uniform_ne(h, h_game, t)
            back = project_witness(t, pr, verify=False)
            ok["project"] &= back == s and _passes(g, back)
            ok["assignment"] &= witness_to_assignment(rg, back).bits == xi.bits
            if not all(ok.values()) and report.counterexample is None:
                report.counterexample = f"assignment {''.join('1' if b else '0' for b in xi.bits)}"
        for stage, good in ok.items():
            report.record(stage, good, f"{len(assignments)} assignment(s)" if stage == "witness_G" else "")
        try:
            found = find_undominated_out_regular(g, budget)
        except BudgetExhausted:
            report.record("finder_G", None, "budget exhausted")
        else:
            good = found is not None and formula.evaluate(witness_to_assignment(rg, found.vertices).bits) \
                and not positive_outweight_violations(g, found.vertices)
            report.record("finder_G", good, "witness found" if found else "none found")
    else:
        try:
            found = find_undominated_out_regular(g, budget)
        except BudgetExhausted:
            report.record("finder_G", None, "budget exhausted")
        else:
            report.record("finder_G", found is None, "none found" if found is None else "unexpected witness")
        if len(g.vertices) <= NAIVE_ORACLE_MAX_VERTICES:
            report.record("naive_G", not naive_witness_masks(g), f"{2 ** len(g.vertices)} subsets")
        else:
            report.record("naive_G", None, f"{len(g.vertices)} vertices exceeds naive limit")
    return report


def _passes(graph: WeightedBipartiteDigraph, subset) -> bool:
    try:
        return is_undominated_out_regular(graph, subset)
    except ValueError:
        return False


# -- bundled corpus ----------------------------------------------------------


def corpus_names() -> list[str]:
    files = resources.files("planar_une") / "corpus"
    return sorted(p.name[:-4] for p in files.iterdir() if p.name.endswith(".cnf"))


def load_corpus(name: str) -> CnfFormula:
    """Parse and normalize one bundled DIMACS instance."""
    text = (resources.files("planar_une") / "corpus" / f"{name}.cnf").read_text()
    return normalize(parse_dimacs(text))[0]


def corpus() -> dict[str, CnfFormula]:
    return {name: load_corpus(name) for name in corpus_names()}


def run_suite(suite: str, seed: int | None = None, trials: int = 500, budget: int | None = DEFAULT_BUDGET,
              formulas: dict[str, CnfFormula] | None = None) -> list[VerificationReport]:
    """Run a named suite: ``equivalence``, ``theorem3``, ``lemma4`` or ``all``."""
    if suite not in ("equivalence", "theorem3", "lemma4", "all"):
        raise ValueError(f"unknown suite {suite!r}")
    reports = []
    if suite in ("equivalence", "all"):
        if seed is None:
            raise ValueError("randomized suites need an explicit seed")
        for weights in ((1,), (1, 2)):
            spec = RandomGameSpec(4, 4, weights, weights, 0.5, seed, min_rows=1, min_cols=1)
            reports.append(crosscheck_equivalence(spec, trials))
    if suite in ("theorem3", "lemma4", "all"):
        formulas = corpus() if formulas is None else formulas
        for name, formula in formulas.items():
            if suite == "lemma4":
                report = end_to_end(formula, budget, name)
                if report.stages.get("lift") and not report.details["crossings"].startswith("0 "):
                    reports.append(report)
            else:
                reports.append(end_to_end(formula, budget, name))
    return reports


def summarize(reports: Sequence[VerificationReport]) -> str:
    return "".join(r.to_text() for r in reports)
