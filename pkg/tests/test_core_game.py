from fractions import Fraction
from itertools import product

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from planar_une.core_game import (
    BimatrixGame,
    MixedStrategy,
    SupportPair,
    check_uniform_equilibrium,
    enumerate_uniform_equilibria,
    expected_payoffs,
    format_game,
    is_nash_equilibrium,
    parse_game,
    support_pair_mask,
    to_fraction,
    uniform_strategy,
    weight_class_profile,
)
from planar_une.errors import BudgetExhausted, InvalidArgument, ParseError


def dense_payoff(game, matrix, x_row, x_col):
    """Plain double sum, deliberately not sharing code with the library."""
    return sum(
        (x_row.weight(r) * x_col.weight(c) * matrix[i][j]
         for (i, r), (j, c) in product(enumerate(game.row_strategies), enumerate(game.col_strategies))),
        Fraction(0),
    )


def full(game, side, weights):
    names = game.strategies(side)
    return MixedStrategy(side, {s: Fraction(w) for s, w in zip(names, weights)})


matching = BimatrixGame.from_matrices([[1, 0], [0, 1]], [[0, 1], [1, 0]])


def test_floats_are_refused():
    with pytest.raises(InvalidArgument):
        to_fraction(0.5)
    with pytest.raises(InvalidArgument):
        BimatrixGame.from_matrices([[0.5]], [[1]])
    assert to_fraction("2/6") == Fraction(1, 3)


def test_negative_and_ragged_payoffs_rejected():
    with pytest.raises(InvalidArgument):
        BimatrixGame.from_matrices([[-1]], [[1]])
    with pytest.raises(InvalidArgument):
        BimatrixGame.from_matrices([[1, 0], [1]], [[1, 0], [1, 0]])


def test_mixed_strategy_must_sum_to_one_exactly():
    with pytest.raises(InvalidArgument):
        MixedStrategy("row", {"r1": Fraction(1, 3), "r2": Fraction(1, 3)})
    s = uniform_strategy("row", ["r1", "r2", "r3"])
    assert s.weights == {"r1": Fraction(1, 3), "r2": Fraction(1, 3), "r3": Fraction(1, 3)}


def test_matching_pennies_only_full_support():
    found = enumerate_uniform_equilibria(matching)
    assert found == [SupportPair({"r1", "r2"}, {"c1", "c2"})]
    x_row = uniform_strategy("row", ["r1", "r2"])
    x_col = uniform_strategy("col", ["c1", "c2"])
    assert expected_payoffs(matching, x_row, x_col) == (Fraction(1, 2), Fraction(1, 2))


def test_pure_equilibrium_in_coordination_game():
    game = BimatrixGame.from_matrices([[1, 0], [0, 0]], [[1, 0], [0, 0]])
    assert check_uniform_equilibrium(game, SupportPair({"r1"}, {"c1"}))
    assert not check_uniform_equilibrium(game, SupportPair({"r2"}, {"c1"}))


def test_enumeration_is_in_mask_order():
    game = BimatrixGame.from_matrices([[1, 1], [1, 1]], [[1, 1], [1, 1]])
    found = enumerate_uniform_equilibria(game)
    masks = [support_pair_mask(game, p) for p in found]
    assert masks == sorted(masks) and len(found) == 9


def test_enumeration_budget():
    with pytest.raises(BudgetExhausted):
        enumerate_uniform_equilibria(matching, budget=2)


def test_expected_payoffs_match_dense_sum():
    rng = np.random.default_rng(3)
    for _ in range(20):
        mr = rng.integers(0, 4, size=(3, 3)).tolist()
        mc = rng.integers(0, 4, size=(3, 3)).tolist()
        game = BimatrixGame.from_matrices(mr, mc)
        wr = rng.integers(1, 5, size=3)
        wc = rng.integers(1, 5, size=3)
        x_row = full(game, "row", [Fraction(int(w), int(wr.sum())) for w in wr])
        x_col = full(game, "col", [Fraction(int(w), int(wc.sum())) for w in wc])
        assert expected_payoffs(game, x_row, x_col) == (
            dense_payoff(game, game.payoff_row, x_row, x_col),
            dense_payoff(game, game.payoff_col, x_row, x_col),
        )


def test_random_mixed_deviations_never_profit():
    rng = np.random.default_rng(11)
    games = [
        BimatrixGame.from_matrices(rng.integers(0, 3, size=(3, 4)).tolist(), rng.integers(0, 3, size=(3, 4)).tolist())
        for _ in range(30)
    ]
    checked = 0
    for game in games:
        for pair in enumerate_uniform_equilibria(game):
            x_row = uniform_strategy("row", pair.row_support)
            x_col = uniform_strategy("col", pair.col_support)
            base_r, base_c = expected_payoffs(game, x_row, x_col)
            for _ in range(100):
                wr = rng.integers(0, 7, size=3)
                wc = rng.integers(0, 7, size=4)
                if wr.sum() == 0 or wc.sum() == 0:
                    continue
                dev_r = full(game, "row", [Fraction(int(w), int(wr.sum())) for w in wr])
                dev_c = full(game, "col", [Fraction(int(w), int(wc.sum())) for w in wc])
                assert dense_payoff(game, game.payoff_row, dev_r, x_col) <= base_r
                assert dense_payoff(game, game.payoff_col, x_row, dev_c) <= base_c
            checked += 1
    assert checked > 0


def test_profitable_deviation_detected():
    x_row = uniform_strategy("row", ["r1"])
    x_col = uniform_strategy("col", ["c1"])
    assert not is_nash_equilibrium(matching, x_row, x_col)


small_matrix = st.lists(st.lists(st.integers(0, 2), min_size=3, max_size=3), min_size=2, max_size=2)


@settings(max_examples=60, deadline=None)
@given(small_matrix, small_matrix, st.fractions(min_value=Fraction(1, 50), max_value=50))
def test_equilibria_invariant_under_positive_scaling(mr, mc, lam):
    game = BimatrixGame.from_matrices(mr, mc)
    assert enumerate_uniform_equilibria(game.scaled(lam)) == enumerate_uniform_equilibria(game)


def test_weight_class_profile():
    game = BimatrixGame.from_matrices([[1, 0], [2, 1]], [[0, 0], [Fraction(1, 2), 0]])
    profile = weight_class_profile(game)
    assert profile.as_tuple() == (2, 1)
    assert profile.class_row == {1, 2} and profile.class_col == {Fraction(1, 2)}
    zero = weight_class_profile(BimatrixGame.from_matrices([[0]], [[1]]))
    assert zero.is_degenerate


def test_game_file_round_trip():
    text = "game 2 3\n1 0 1/2\n0 2 0\n0 1 0\n3/4 0 1\n"
    game = parse_game(text)
    assert game.payoff_row[0][2] == Fraction(1, 2)
    assert format_game(game) == text
    assert format_game(parse_game(format_game(game))) == text


def test_game_file_comments_and_errors():
    assert parse_game("# demo\ngame 1 1  # header\n1\n1\n").shape == (1, 1)
    with pytest.raises(ParseError, match="line 3"):
        parse_game("game 1 2\n1 0\n1\n")
    with pytest.raises(ParseError, match="line 2"):
        parse_game("game 1 1\nx\n1\n")
    with pytest.raises(ParseError):
        parse_game("")
