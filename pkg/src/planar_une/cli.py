"""Command-line front end.

Exit codes: 0 decided / passed, 1 decided negatively (check failed, verify
failed), 2 usage or input error, 3 budget exhausted before a decision.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .core_game import (
    SupportPair,
    check_uniform_equilibrium,
    format_fraction,
    parse_game,
)
from .errors import BudgetExhausted, InvalidArgument, ParseError, WitnessError
from .graph_model import (
    WeightedBipartiteDigraph,
    diagnose,
    find_undominated_out_regular,
    format_graph,
    format_witness,
    game_to_graph,
    parse_graph,
    parse_witness,
    to_dot,
)
from .harness import DEFAULT_BUDGET, run_suite, summarize
from .planarizer import (
    format_registry,
    format_role_map,
    insert_gadgets,
    load_registry,
    load_role_map,
)
from .sat_reduction import (
    build_reduction_graph,
    clause_gadget_vertices,
    normalize,
    parse_dimacs,
    variable_gadget_vertices,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_UNDECIDED = 0, 1, 2, 3
BUDGET_ENV = "PLANAR_UNE_BUDGET"


class UsageError(Exception):
    pass


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _write(path: str | Path, text: str) -> None:
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc.strerror}") from None


def _sidecar(path: str, suffix: str) -> Path:
    p = Path(path)
    return p.with_name(p.stem + suffix)


def _check_writable(*paths) -> None:
    for path in paths:
        if path is None:
            continue
        parent = Path(path).resolve().parent
        if not parent.is_dir() or not os.access(parent, os.W_OK):
            raise UsageError(f"cannot write {path}: directory missing or read-only")


def _default_budget() -> int:
    raw = os.environ.get(BUDGET_ENV)
    if raw is None:
        return DEFAULT_BUDGET
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"{BUDGET_ENV} must be an integer, got {raw!r}") from None


def load_instance(path: str) -> tuple[str, object]:
    """Return ``("game", BimatrixGame)`` or ``("graph", WeightedBipartiteDigraph)`` by header."""
    text = _read(path)
    first = next((line.split("#", 1)[0].split() for line in text.splitlines() if line.split("#", 1)[0].strip()), [])
    if first[:1] == ["game"]:
        return "game", parse_game(text)
    if first[:1] == ["graph"]:
        return "graph", parse_graph(text)
    raise ParseError(f"{path}: expected a 'game' or 'graph' header")


def cmd_reduce(args) -> int:
    _check_writable(args.out, args.planar)
    formula, report = normalize(parse_dimacs(_read(args.cnf)))
    rg = build_reduction_graph(formula)
    _write(args.out, format_graph(rg.graph))
    _write(_sidecar(args.out, ".roles.json"), format_role_map(rg))
    sys.stderr.write(report.to_text())
    print(f"G_phi: {len(rg.graph.vertices)} vertices, {len(rg.graph.arcs)} arcs, heavy weight {rg.heavy_weight}")
    if args.planar:
        pr = insert_gadgets(rg)
        _write(args.planar, format_graph(pr.graph))
        _write(_sidecar(args.planar, ".registry.json"), format_registry(pr))
        print(f"H_phi: {len(pr.graph.vertices)} vertices, {len(pr.graph.arcs)} arcs, {len(pr.crossings)} gadgets")
    return EXIT_OK


def cmd_solve(args) -> int:
    _check_writable(args.out)
    kind, inst = load_instance(args.instance)
    budget = args.budget if args.budget is not None else _default_budget()
    graph = game_to_graph(inst) if kind == "game" else inst
    try:
        witness = find_undominated_out_regular(graph, budget)
    except BudgetExhausted:
        print("budget-exhausted")
        return EXIT_UNDECIDED
    if witness is None:
        print("none")
        return EXIT_OK
    params = f"(alpha,beta)=({format_fraction(witness.alpha)},{format_fraction(witness.beta)})"
    if kind == "game":
        pair = SupportPair(witness.subset_row, witness.subset_col)
        rows, cols = pair.ordered(inst)
        comment = f"uniform Nash equilibrium supports {params}\nrow support: {' '.join(rows)}\ncolumn support: {' '.join(cols)}"
    else:
        comment = f"undominated out-regular set {params}"
    text = format_witness(witness.vertices, graph, comment)
    if args.out:
        _write(args.out, text)
    sys.stdout.write(text)
    return EXIT_OK


def cmd_check(args) -> int:
    kind, inst = load_instance(args.instance)
    subset = parse_witness(_read(args.witness))
    graph = game_to_graph(inst) if kind == "game" else inst
    unknown = [v for v in subset if v not in graph._index]
    if unknown:
        raise UsageError(f"witness names unknown vertices: {' '.join(unknown)}")
    try:
        witness, problems = diagnose(graph, subset)
    except InvalidArgument as exc:
        print(f"fail: {exc}")
        return EXIT_FAIL
    if kind == "game":
        pair = SupportPair(witness.subset_row if witness else [v for v in subset if graph.is_row(v)],
                           witness.subset_col if witness else [v for v in subset if not graph.is_row(v)])
        if check_uniform_equilibrium(inst, pair) != (not problems):
            raise RuntimeError("game-side and graph-side checks disagree")
    if problems:
        for p in problems:
            print(f"fail: {p}")
        return EXIT_FAIL
    print(f"pass (alpha,beta)=({format_fraction(witness.alpha)},{format_fraction(witness.beta)})")
    return EXIT_OK


def cmd_verify(args) -> int:
    if args.suite in ("equivalence", "all") and args.seed is None:
        raise UsageError("--seed is required for randomized suites")
    formulas = None
    if args.cnf:
        formulas = {Path(p).stem: normalize(parse_dimacs(_read(p)))[0] for p in args.cnf}
    _check_writable(args.report)
    budget = args.budget if args.budget is not None else _default_budget()
    reports = run_suite(args.suite, args.seed, args.trials, budget, formulas)
    if args.suite == "lemma4" and not reports:
        print("lemma4: no satisfiable instance with a crossing to check")
        return EXIT_FAIL
    text = summarize(reports)
    sys.stdout.write(text)
    if args.report:
        _write(args.report, text + "".join(r.to_kv() for r in reports))
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAIL


def cmd_export(args) -> int:
    _check_writable(args.dot)
    kind, inst = load_instance(args.instance)
    graph: WeightedBipartiteDigraph = game_to_graph(inst) if kind == "game" else inst
    clusters = None
    if args.registry:
        pr = load_registry(_read(args.registry), graph)
        clusters = {f"gadget {g.crossing.index}": g.vertices for g in pr.gadgets}
    if args.variable_gadget is not None or args.clause_gadget is not None:
        rg = load_role_map(_read(args.roles or str(_sidecar(args.instance, ".roles.json"))), graph)
        if args.variable_gadget is not None:
            if not 1 <= args.variable_gadget <= rg.n:
                raise UsageError(f"variable index must be in 1..{rg.n}")
            keep = variable_gadget_vertices(rg, args.variable_gadget)
        else:
            if not 1 <= args.clause_gadget <= rg.m:
                raise UsageError(f"clause index must be in 1..{rg.m}")
            keep = clause_gadget_vertices(rg, args.clause_gadget)
        graph = graph.induced(keep)
    _write(args.dot, to_dot(graph, clusters))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="planar-une", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("reduce", help="compile a DIMACS CNF into G_phi (and H_phi with --planar)")
    p.add_argument("cnf")
    p.add_argument("-o", "--out", required=True, help="G_phi graph file; a .roles.json sidecar is written next to it")
    p.add_argument("--planar", metavar="H_GRAPH", help="also write H_phi here, with a .registry.json sidecar")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("solve", help="search a game or graph for a uniform equilibrium / witness")
    p.add_argument("instance")
    p.add_argument("--budget", type=int, help=f"node expansions (default ${BUDGET_ENV} or {DEFAULT_BUDGET})")
    p.add_argument("-o", "--out", help="also write the witness file here")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("check", help="verify a witness against a game or graph")
    p.add_argument("instance")
    p.add_argument("witness")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("verify", help="run a verification suite")
    p.add_argument("suite", choices=["equivalence", "theorem3", "lemma4", "all"])
    p.add_argument("--seed", type=int)
    p.add_argument("--trials", type=int, default=500)
    p.add_argument("--cnf", action="append", help="DIMACS instance (repeatable; default: bundled corpus)")
    p.add_argument("--budget", type=int)
    p.add_argument("--report", help="write the text + key=value report here")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("export", help="write a DOT rendering of a game or graph")
    p.add_argument("instance")
    p.add_argument("dot")
    p.add_argument("--registry", help="gadget registry; draws gadgets as clusters")
    p.add_argument("--roles", help="role map (default: <instance>.roles.json)")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--variable-gadget", type=int, metavar="I")
    group.add_argument("--clause-gadget", type=int, metavar="J")
    p.set_defaults(func=cmd_export)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (UsageError, ParseError, InvalidArgument, WitnessError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
