"""Exception types shared across the package."""


class InvalidArgument(ValueError):
    """Input violates an operation's precondition."""


class DegenerateGame(InvalidArgument):
    """A payoff matrix has no positive entry."""


class BudgetExhausted(RuntimeError):
    """An exhaustive search ran out of node expansions before deciding.

    Distinct from a "none found" answer: the question is left undecided.
    """

    def __init__(self, budget: int, what: str = "search"):
        super().__init__(f"{what} exhausted its budget of {budget} expansions")
        self.budget = budget


class ParseError(ValueError):
    """Malformed instance or witness text."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class WitnessError(ValueError):
    """A witness could not be built or translated."""
