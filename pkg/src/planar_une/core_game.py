"""Bimatrix games with exact rational payoffs and uniform Nash equilibria.

A uniform strategy is determined by its support alone, so deciding whether a
pair of supports is a uniform Nash equilibrium is a finite, exact check.
Deviations are only tested against pure strategies: expected payoff is linear
in the deviating player's mixed strategy, so no mixed deviation can beat the
best pure one.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Literal, Mapping, Sequence

from .errors import BudgetExhausted, InvalidArgument, ParseError

Side = Literal["row", "col"]


def to_fraction(value) -> Fraction:
    """Convert ints, Fractions and ``"p/q"`` strings exactly; floats are refused."""
    if isinstance(value, float):
        raise InvalidArgument(f"refusing inexact float payoff {value!r}")
    if isinstance(value, str):
        return Fraction(value.strip())
    return Fraction(value)


def format_fraction(value: Fraction) -> str:
    return str(value.numerator) if value.denominator == 1 else f"{value.numerator}/{value.denominator}"


@dataclass(frozen=True)
class BimatrixGame:
    row_strategies: tuple[str, ...]
    col_strategies: tuple[str, ...]
    payoff_row: tuple[tuple[Fraction, ...], ...]
    payoff_col: tuple[tuple[Fraction, ...], ...]
    _row_nz: tuple = field(init=False, repr=False, compare=False)
    _col_nz: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        nr, nc = len(self.row_strategies), len(self.col_strategies)
        if nr == 0 or nc == 0:
            raise InvalidArgument("both strategy sets must be non-empty")
        if len(set(self.row_strategies)) != nr or len(set(self.col_strategies)) != nc:
            raise InvalidArgument("duplicate strategy identifier")
        for name, mat in (("payoff_row", self.payoff_row), ("payoff_col", self.payoff_col)):
            if len(mat) != nr or any(len(row) != nc for row in mat):
                raise InvalidArgument(f"{name} must be {nr}x{nc}")
            if any(v.numerator < 0 for row in mat for v in row):
                raise InvalidArgument(f"{name} has a negative entry")
        # sparse views: row i of M_R and column j of M_C, nonzero entries only
        object.__setattr__(self, "_row_nz", tuple(
            tuple((j, v) for j, v in enumerate(row) if v) for row in self.payoff_row))
        object.__setattr__(self, "_col_nz", tuple(
            tuple((i, self.payoff_col[i][j]) for i in range(nr) if self.payoff_col[i][j]) for j in range(nc)))

    @classmethod
    def from_matrices(
        cls,
        payoff_row: Sequence[Sequence],
        payoff_col: Sequence[Sequence],
        row_strategies: Sequence[str] | None = None,
        col_strategies: Sequence[str] | None = None,
    ) -> BimatrixGame:
        mr = tuple(tuple(to_fraction(v) for v in row) for row in payoff_row)
        mc = tuple(tuple(to_fraction(v) for v in row) for row in payoff_col)
        if row_strategies is None:
            row_strategies = [f"r{i + 1}" for i in range(len(mr))]
        if col_strategies is None:
            ncols = len(mr[0]) if mr else 0
            col_strategies = [f"c{j + 1}" for j in range(ncols)]
        return cls(tuple(row_strategies), tuple(col_strategies), mr, mc)

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.row_strategies), len(self.col_strategies)

    def strategies(self, side: Side) -> tuple[str, ...]:
        return self.row_strategies if side == "row" else self.col_strategies

    def scaled(self, factor) -> BimatrixGame:
        lam = to_fraction(factor)
        if lam <= 0:
            raise InvalidArgument("scale factor must be positive")
        return BimatrixGame(
            self.row_strategies,
            self.col_strategies,
            tuple(tuple(v * lam for v in row) for row in self.payoff_row),
            tuple(tuple(v * lam for v in row) for row in self.payoff_col),
        )


@dataclass(frozen=True)
class MixedStrategy:
    owner: Side
    weights: Mapping[str, Fraction]

    def __post_init__(self):
        if self.owner not in ("row", "col"):
            raise InvalidArgument(f"unknown side {self.owner!r}")
        if any(w < 0 for w in self.weights.values()):
            raise InvalidArgument("negative probability")
        if sum(self.weights.values(), Fraction(0)) != 1:
            raise InvalidArgument("probabilities must sum to exactly 1")

    @property
    def support(self) -> frozenset[str]:
        return frozenset(s for s, w in self.weights.items() if w > 0)

    def weight(self, strategy: str) -> Fraction:
        return self.weights.get(strategy, Fraction(0))


@dataclass(frozen=True)
class SupportPair:
    row_support: frozenset[str]
    col_support: frozenset[str]

    def __post_init__(self):
        object.__setattr__(self, "row_support", frozenset(self.row_support))
        object.__setattr__(self, "col_support", frozenset(self.col_support))
        if not self.row_support or not self.col_support:
            raise InvalidArgument("supports must be non-empty")

    def validate(self, game: BimatrixGame) -> None:
        if not self.row_support <= set(game.row_strategies):
            raise InvalidArgument(f"unknown row strategies {sorted(self.row_support - set(game.row_strategies))}")
        if not self.col_support <= set(game.col_strategies):
            raise InvalidArgument(f"unknown column strategies {sorted(self.col_support - set(game.col_strategies))}")

    def ordered(self, game: BimatrixGame) -> tuple[list[str], list[str]]:
        return (
            [r for r in game.row_strategies if r in self.row_support],
            [c for c in game.col_strategies if c in self.col_support],
        )


@dataclass(frozen=True)
class WeightClassProfile:
    rho_row: int
    rho_col: int
    class_row: frozenset[Fraction] = field(default_factory=frozenset)
    class_col: frozenset[Fraction] = field(default_factory=frozenset)

    @property
    def is_degenerate(self) -> bool:
        """An all-zero payoff matrix leaves its class empty."""
        return self.rho_row == 0 or self.rho_col == 0

    def as_tuple(self) -> tuple[int, int]:
        return self.rho_row, self.rho_col


def uniform_strategy(side: Side, support: Iterable[str]) -> MixedStrategy:
    members = list(dict.fromkeys(support))
    if not members:
        raise InvalidArgument("uniform strategy needs a non-empty support")
    p = Fraction(1, len(members))
    return MixedStrategy(side, {s: p for s in members})


def _check_fits(game: BimatrixGame, x_row: MixedStrategy, x_col: MixedStrategy) -> None:
    if x_row.owner != "row" or x_col.owner != "col":
        raise InvalidArgument("expected (row strategy, column strategy)")
    unknown_r = set(x_row.weights) - set(game.row_strategies)
    unknown_c = set(x_col.weights) - set(game.col_strategies)
    if unknown_r or unknown_c:
        raise InvalidArgument(f"strategy not in game: {sorted(unknown_r | unknown_c)}")


def _pure_payoffs(game: BimatrixGame, x_row: MixedStrategy, x_col: MixedStrategy):
    """Payoff of every pure row strategy against x_col, and of every pure column strategy against x_row."""
    xc = [x_col.weight(c) for c in game.col_strategies]
    xr = [x_row.weight(r) for r in game.row_strategies]
    row_vals = [sum((v * xc[j] for j, v in nz if xc[j]), Fraction(0)) for nz in game._row_nz]
    col_vals = [sum((v * xr[i] for i, v in nz if xr[i]), Fraction(0)) for nz in game._col_nz]
    rows = [(i, p) for i, p in enumerate(xr) if p]
    cols = [(j, q) for j, q in enumerate(xc) if q]
    return row_vals, col_vals, rows, cols


def expected_payoffs(game: BimatrixGame, x_row: MixedStrategy, x_col: MixedStrategy) -> tuple[Fraction, Fraction]:
    """Return ``(x_R^T M_R x_C, x_R^T M_C x_C)`` exactly."""
    _check_fits(game, x_row, x_col)
    row_vals, col_vals, rows, cols = _pure_payoffs(game, x_row, x_col)
    u_row = sum((p * row_vals[i] for i, p in rows), Fraction(0))
    u_col = sum((q * col_vals[j] for j, q in cols), Fraction(0))
    return u_row, u_col


def is_nash_equilibrium(game: BimatrixGame, x_row: MixedStrategy, x_col: MixedStrategy) -> bool:
    _check_fits(game, x_row, x_col)
    row_vals, col_vals, rows, cols = _pure_payoffs(game, x_row, x_col)
    u_row = sum((p * row_vals[i] for i, p in rows), Fraction(0))
    u_col = sum((q * col_vals[j] for j, q in cols), Fraction(0))
    return u_row >= max(row_vals) and u_col >= max(col_vals)


def check_uniform_equilibrium(game: BimatrixGame, pair: SupportPair) -> bool:
    pair.validate(game)
    return is_nash_equilibrium(
        game,
        uniform_strategy("row", pair.row_support),
        uniform_strategy("col", pair.col_support),
    )


def support_pair_mask(game: BimatrixGame, pair: SupportPair) -> int:
    """Vertex-id bitmask of a support pair: rows take bits 0..|R|-1, columns follow."""
    nr = len(game.row_strategies)
    mask = 0
    for i, r in enumerate(game.row_strategies):
        if r in pair.row_support:
            mask |= 1 << i
    for j, c in enumerate(game.col_strategies):
        if c in pair.col_support:
            mask |= 1 << (nr + j)
    return mask


def enumerate_uniform_equilibria(game: BimatrixGame, budget: int | None = None) -> list[SupportPair]:
    """All support pairs whose uniform strategies form a Nash equilibrium.

    Results come in increasing vertex-id bitmask order (see
    :func:`support_pair_mask`). ``budget`` caps the number of support pairs
    examined; exceeding it raises :class:`BudgetExhausted`.
    """
    rows, cols = game.row_strategies, game.col_strategies
    nr, nc = len(rows), len(cols)
    found = []
    examined = 0
    for cmask in range(1, 1 << nc):
        col_support = frozenset(c for j, c in enumerate(cols) if cmask >> j & 1)
        for rmask in range(1, 1 << nr):
            examined += 1
            if budget is not None and examined > budget:
                raise BudgetExhausted(budget, "uniform equilibrium enumeration")
            pair = SupportPair(frozenset(r for i, r in enumerate(rows) if rmask >> i & 1), col_support)
            if check_uniform_equilibrium(game, pair):
                found.append(pair)
    return found


def weight_class_profile(game: BimatrixGame) -> WeightClassProfile:
    class_row = frozenset(v for row in game.payoff_row for v in row if v != 0)
    class_col = frozenset(v for row in game.payoff_col for v in row if v != 0)
    return WeightClassProfile(len(class_row), len(class_col), class_row, class_col)


# -- plain-text game files ---------------------------------------------------


def _content_lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line


def parse_game(text: str) -> BimatrixGame:
    """Read ``game <|R|> <|C|>`` followed by the M_R rows then the M_C rows."""
    lines = list(_content_lines(text))
    if not lines:
        raise ParseError("empty game file")
    lineno, header = lines[0]
    fields = header.split()
    if len(fields) != 3 or fields[0] != "game":
        raise ParseError(f"expected 'game <rows> <cols>' header, got {header!r}", lineno)
    try:
        nr, nc = int(fields[1]), int(fields[2])
    except ValueError:
        raise ParseError(f"non-integer dimensions in {header!r}", lineno) from None
    if nr < 1 or nc < 1:
        raise ParseError("dimensions must be positive", lineno)
    body = lines[1:]
    if len(body) != 2 * nr:
        raise ParseError(f"expected {2 * nr} matrix rows, found {len(body)}", body[-1][0] if body else lineno)
    matrix_rows = []
    for lineno, line in body:
        entries = line.split()
        if len(entries) != nc:
            raise ParseError(f"expected {nc} entries, found {len(entries)}", lineno)
        try:
            row = [Fraction(e) for e in entries]
        except (ValueError, ZeroDivisionError):
            raise ParseError(f"bad rational in {line!r}", lineno) from None
        if any(v < 0 for v in row):
            raise ParseError("negative payoff", lineno)
        matrix_rows.append(row)
    return BimatrixGame.from_matrices(matrix_rows[:nr], matrix_rows[nr:])


def format_game(game: BimatrixGame) -> str:
    nr, nc = game.shape
    out = [f"game {nr} {nc}"]
    for mat in (game.payoff_row, game.payoff_col):
        out.extend(" ".join(format_fraction(v) for v in row) for row in mat)
    return "\n".join(out) + "\n"
