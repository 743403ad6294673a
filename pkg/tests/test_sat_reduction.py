from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from planar_une.core_game import weight_class_profile
from planar_une.errors import InvalidArgument, ParseError, WitnessError
from planar_une.graph_model import (
    check_out_regular,
    diagnose,
    find_undominated_out_regular,
    graph_to_game,
    is_strongly_connected,
    is_undominated_out_regular,
)
from planar_une.harness import corpus_names, load_corpus
from planar_une.oracles import naive_witness_masks
from planar_une.sat_reduction import (
    CnfFormula,
    assignment_to_witness,
    brute_force_sat,
    build_reduction_graph,
    clause_gadget_vertices,
    iter_satisfying,
    normalize,
    parse_dimacs,
    variable_gadget_vertices,
    witness_to_assignment,
)


def truth_table(formula):
    """Satisfying rows by direct evaluation, independent of iter_satisfying."""
    rows = []
    for bits in product((False, True), repeat=formula.num_vars):
        if all(any(bits[v - 1] == pos for v, pos in c) for c in formula.clauses):
            rows.append(bits)
    return rows


def test_dimacs_parsing():
    f = parse_dimacs("c comment\np cnf 3 2\n1 -2\n 3 0\n-1 0\n")
    assert f.as_ints() == [[1, -2, 3], [-1]]
    assert parse_dimacs(f.to_dimacs()) == f


@pytest.mark.parametrize("text, line", [
    ("p cnf 2 1\n1 x 0\n", 2),
    ("p cnf 2 1\n1 3 0\n", 2),
    ("1 2 0\n", 1),
    ("p cnf 2 1\n\n1 0 0\n", 3),
])
def test_dimacs_errors_carry_line_numbers(text, line):
    with pytest.raises(ParseError, match=f"line {line}"):
        parse_dimacs(text)


def test_dimacs_clause_count_checked():
    with pytest.raises(ParseError):
        parse_dimacs("p cnf 2 2\n1 2 0\n")


def test_normalize_pads_and_covers():
    f, report = normalize(CnfFormula.from_ints(2, [[1, 2]]))
    assert f.is_normalized()
    assert f.clauses[0] == ((1, True), (2, True), (1, True))
    assert report.padded and len(report.fresh) == 2
    assert "fresh variable x3" in report.to_text()


def test_normalize_rejects_long_clauses():
    with pytest.raises(InvalidArgument):
        normalize(CnfFormula.from_ints(4, [[1, 2, 3, 4]]))


clause = st.lists(st.integers(1, 4).flatmap(lambda v: st.sampled_from([v, -v])), min_size=1, max_size=3)


@settings(max_examples=150, deadline=None)
@given(st.lists(clause, min_size=1, max_size=5))
def test_normalize_preserves_satisfiability(clauses):
    f = CnfFormula.from_ints(4, clauses)
    g, _ = normalize(f)
    assert g.is_normalized()
    original = truth_table(f)
    normalized = truth_table(g)
    assert bool(original) == bool(normalized)
    # the original variables keep their meaning: projections coincide
    assert {row[: f.num_vars] for row in normalized} == set(original)


def test_brute_force_order_and_agreement():
    f = CnfFormula.from_ints(2, [[1, 2]])
    assert [a.bits for a in iter_satisfying(f)] == [(False, True), (True, False), (True, True)]
    assert brute_force_sat(CnfFormula.from_ints(1, [[1], [-1]])) is None


def test_fig2_constants(fig2):
    g = fig2.graph
    assert (fig2.n, fig2.m) == (4, 3)
    assert len(g.vertices) == 46 and len(g.arcs) == 62 and fig2.heavy_weight == 7
    assert is_strongly_connected(g)


@pytest.mark.parametrize("name", corpus_names())
def test_structural_constants(name):
    f, _ = normalize(load_corpus(name))
    rg = build_reduction_graph(f)
    n, m = f.num_vars, f.num_clauses
    assert len(rg.graph.vertices) == 6 * n + 7 * m + 1
    assert len(rg.graph.arcs) == 8 * n + 10 * m
    profile = weight_class_profile(graph_to_game(rg.graph))
    assert profile.class_row == {1} and profile.class_col == {1, m + n}
    assert is_strongly_connected(rg.graph)


def test_build_requires_normalized():
    with pytest.raises(InvalidArgument):
        build_reduction_graph(CnfFormula.from_ints(2, [[1, 2]]))


def test_every_fig2_assignment_gives_a_witness(fig2):
    rows = truth_table(fig2.formula)
    assert rows
    for bits in rows:
        s = assignment_to_witness(fig2, bits)
        assert len(s) == 26
        assert check_out_regular(fig2.graph, s) == (1, 7)
        assert is_undominated_out_regular(fig2.graph, s)
        assert witness_to_assignment(fig2, s).bits == bits


def test_falsifying_assignment_names_clause(fig2):
    bad = next(bits for bits in product((False, True), repeat=4) if not fig2.formula.evaluate(bits))
    with pytest.raises(WitnessError, match="clause"):
        assignment_to_witness(fig2, bad)


def test_both_literals_selected_is_dominated_by_z(fig2):
    _, problems = diagnose(fig2.graph, ["y1", "ny1", "x1", "nx1"])
    assert any(p.startswith("dominated by z1_2") for p in problems)


def test_witness_to_assignment_rejects_non_witness(fig2):
    with pytest.raises(InvalidArgument):
        witness_to_assignment(fig2, ["y1", "x1"])


def test_gadget_vertex_sets(fig2):
    var = variable_gadget_vertices(fig2, 1)
    assert len(var) == 7 and set(var) == {"a", "z1_1", "z1_2", "x1", "nx1", "y1", "ny1"}
    cl = clause_gadget_vertices(fig2, 1)
    assert len(cl) == 11
    assert {"x1", "nx2", "x3"} <= set(cl)


@pytest.mark.parametrize("name", [n for n in corpus_names() if n.startswith("unsat")])
def test_unsatisfiable_instances_have_no_witness(name):
    f, _ = normalize(load_corpus(name))
    assert not truth_table(f)
    rg = build_reduction_graph(f)
    assert find_undominated_out_regular(rg.graph, budget=10**6) is None
    if len(rg.graph.vertices) <= 21:
        assert naive_witness_masks(rg.graph) == []
