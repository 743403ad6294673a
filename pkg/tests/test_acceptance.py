"""Acceptance criteria, one test each; every test records a PASS/FAIL line."""

import time
from fractions import Fraction

import numpy as np

from planar_une.core_game import (
    format_game,
    is_nash_equilibrium,
    parse_game,
    uniform_strategy,
    weight_class_profile,
)
from planar_une.errors import DegenerateGame
from planar_une.graph_model import (
    check_out_regular,
    find_undominated_out_regular,
    format_graph,
    format_witness,
    game_to_graph,
    graph_to_game,
    is_planar,
    is_strongly_connected,
    is_undominated_out_regular,
    parse_graph,
    parse_witness,
)
from planar_une.harness import (
    PASS,
    RandomGameSpec,
    corpus,
    crosscheck_equivalence,
    generate_random_game,
    positive_outweight_violations,
)
from planar_une.oracles import count_polyline_crossings, naive_witness_masks
from planar_une.planarizer import (
    format_registry,
    format_role_map,
    lift_witness,
    load_registry,
    load_role_map,
    planarize,
    project_witness,
)
from planar_une.sat_reduction import (
    assignment_to_witness,
    iter_satisfying,
    normalize,
    parse_dimacs,
    witness_to_assignment,
)

NAIVE_LIMIT = 24

_reductions = {}


def reductions():
    if not _reductions:
        for name, formula in corpus().items():
            _reductions[name] = planarize(normalize(formula)[0])
    return _reductions


def satisfiable():
    return {n: pr for n, pr in reductions().items() if next(iter_satisfying(pr.base.formula), None)}


def uniform_ne(graph, game, subset):
    members = set(subset)
    return is_nash_equilibrium(
        game,
        uniform_strategy("row", [v for v in graph.row_part if v in members]),
        uniform_strategy("col", [v for v in graph.col_part if v in members]),
    )


def test_criterion_1_equivalence(record_criterion):
    start = time.perf_counter()
    reports = []
    for weights in ((1,), (1, 2)):
        spec = RandomGameSpec(4, 4, weights, weights, 0.5, seed=20261019, min_rows=1, min_cols=1)
        reports.append(crosscheck_equivalence(spec, 500))
    elapsed = time.perf_counter() - start
    ok = all(r.stages["equivalence"] == PASS for r in reports) and elapsed < 60
    detail = "; ".join(f"{r.details['equivalence']}" for r in reports) + f"; {elapsed:.1f}s"
    record_criterion(1, "uniform NE supports == undominated out-regular sets", ok, detail)
    for r in reports:
        assert r.stages["equivalence"] == PASS, r.counterexample
    assert elapsed < 60


def test_criterion_2_forward_direction(record_criterion):
    worst, total, failures = 0.0, 0, []
    sat = satisfiable()
    assert "fig2" in sat
    for name, pr in sat.items():
        rg = pr.base
        n, m = rg.n, rg.m
        assert n <= 5 and m <= 6
        start = time.perf_counter()
        game = graph_to_game(rg.graph)
        for xi in iter_satisfying(rg.formula):
            s = assignment_to_witness(rg, xi)
            total += 1
            if check_out_regular(rg.graph, s) != (1, m + n) or not is_undominated_out_regular(rg.graph, s) \
                    or not uniform_ne(rg.graph, game, s):
                failures.append((name, xi.bits))
        elapsed = time.perf_counter() - start
        worst = max(worst, elapsed)
        if elapsed >= 30:
            failures.append((name, "time"))
    record_criterion(2, "satisfying assignments give (1, m+n) witnesses and uniform NE", not failures,
                     f"{total} assignments over {len(sat)} instances, slowest {worst:.2f}s")
    assert not failures


def test_criterion_3_converse(record_criterion):
    unsat = {n: pr for n, pr in reductions().items() if n not in satisfiable()}
    nones, naive_checked, problems = 0, [], []
    for name, pr in unsat.items():
        g = pr.base.graph
        if find_undominated_out_regular(g, budget=10**6) is None:
            nones += 1
        else:
            problems.append(name)
        if len(g.vertices) <= NAIVE_LIMIT:
            naive_checked.append(f"{name} ({len(g.vertices)} vertices)")
            if naive_witness_masks(g):
                problems.append(f"{name} naive")
    ok = nones >= 5 and not problems and naive_checked
    record_criterion(3, "finder returns none on unsatisfiable instances", ok,
                     f"{nones} instances; naive oracle agrees on {', '.join(naive_checked)}")
    assert ok, problems


def test_criterion_4_structural_constants(record_criterion):
    bad = []
    for name, pr in reductions().items():
        rg = pr.base
        g, n, m = rg.graph, rg.n, rg.m
        profile = weight_class_profile(graph_to_game(g))
        if (len(g.vertices), len(g.arcs)) != (6 * n + 7 * m + 1, 8 * n + 10 * m) \
                or profile.class_row != {1} or profile.class_col != {1, m + n} or not is_strongly_connected(g):
            bad.append(name)
    fig2 = reductions()["fig2"].base
    fig2_ok = (len(fig2.graph.vertices), len(fig2.graph.arcs), fig2.heavy_weight) == (46, 62, 7)
    record_criterion(4, "|V|, |E|, weight classes, strong connectivity", not bad and fig2_ok,
                     f"{len(reductions())} instances; fig2 46/62/7: {fig2_ok}")
    assert not bad and fig2_ok


def test_criterion_5_lift_and_project(record_criterion):
    checked, instances, failures = 0, 0, []
    for name, pr in satisfiable().items():
        if not pr.crossings:
            continue
        instances += 1
        rg = pr.base
        for xi in iter_satisfying(rg.formula):
            s = assignment_to_witness(rg, xi)
            t = lift_witness(s, pr, verify=False)
            back = project_witness(t, pr, verify=False)
            checked += 1
            if not is_undominated_out_regular(pr.graph, t) or back != s \
                    or not rg.formula.evaluate(witness_to_assignment(rg, back).bits):
                failures.append((name, xi.bits))
    ok = instances > 0 and not failures
    record_criterion(5, "lift passes on H, project(lift(S)) == S, assignment satisfies", ok,
                     f"{checked} witnesses over {instances} instances with crossings")
    assert ok, failures


def test_criterion_6_planarity_and_accounting(record_criterion):
    bad = []
    crossings = 0
    for name, pr in reductions().items():
        proper, improper = count_polyline_crossings([a.polyline for a in pr.embedding.routed_arcs])
        added = len(pr.graph.vertices) - len(pr.base.graph.vertices)
        crossings += proper
        if not is_planar(pr.graph) or improper or proper != len(pr.crossings) \
                or added != (4 * pr.width + 7) * proper:
            bad.append(name)
    record_criterion(6, "H planar, added vertices == (4(m+n)+7) x oracle crossings", not bad,
                     f"{len(reductions())} instances, {crossings} crossings")
    assert not bad


def test_criterion_7_positive_outweight(record_criterion):
    witnesses, violations = 0, []
    # random games, via the equivalence harness (its lemma stage covers every witness found)
    for weights in ((1,), (1, 2)):
        report = crosscheck_equivalence(RandomGameSpec(4, 4, weights, weights, 0.5, seed=7, min_rows=1, min_cols=1), 200)
        if report.stages["lemma"] != PASS:
            violations.append(report.counterexample)
    for name, pr in reductions().items():
        g, h = pr.base.graph, pr.graph
        assert is_strongly_connected(g) and is_strongly_connected(h)
        found = find_undominated_out_regular(g, budget=10**6)
        candidates = [(g, found.vertices)] if found else []
        for xi in iter_satisfying(pr.base.formula):
            s = assignment_to_witness(pr.base, xi)
            candidates += [(g, s), (h, lift_witness(s, pr, verify=False))]
        for graph, subset in candidates:
            witnesses += 1
            if positive_outweight_violations(graph, subset):
                violations.append(name)
    record_criterion(7, "every member of a witness sends positive weight into it", not violations,
                     f"400 random games plus {witnesses} corpus witnesses on G and H")
    assert not violations


def test_criterion_8_round_trips(record_criterion):
    rng = np.random.default_rng(8)
    spec = RandomGameSpec(5, 5, (1, 2, Fraction(1, 2)), (1, 3), 0.4, min_rows=1, min_cols=1)
    conversions = 0
    for t in range(250):
        game = generate_random_game(spec.with_seed([8, t]))
        try:
            graph = game_to_graph(game)
        except DegenerateGame:
            continue
        assert graph_to_game(graph) == game and game_to_graph(graph_to_game(graph)) == graph
        text = format_game(game)
        assert format_game(parse_game(text)) == text
        gtext = format_graph(graph)
        assert format_graph(parse_graph(gtext)) == gtext
        conversions += 1
        if rng.random() < 0.1:
            subset = [v for v in graph.vertices if rng.random() < 0.5] or [graph.vertices[0]]
            wtext = format_witness(subset, graph, "sample")
            assert format_witness(parse_witness(wtext), graph, "sample") == wtext
    formats = 0
    for name, pr in reductions().items():
        dimacs = pr.base.formula.to_dimacs()
        assert parse_dimacs(dimacs).to_dimacs() == dimacs
        reg = format_registry(pr)
        assert format_registry(load_registry(reg)) == reg
        roles = format_role_map(pr.base)
        assert format_role_map(load_role_map(roles)) == roles
        htext = format_graph(pr.graph)
        assert format_graph(parse_graph(htext)) == htext
        formats += 4
    ok = conversions >= 200
    record_criterion(8, "graph<->game involution and byte-identical file formats", ok,
                     f"{conversions} random conversions, {formats} corpus files")
    assert ok
