"""Exception types shared across the package."""


class CoinFactoryError(Exception):
    """Base class for all errors raised by this package."""


class InvalidRange(CoinFactoryError):
    """A target function does not map the open parameter domain into (0, 1),
    or at least its positivity could not be certified."""


class CapExceeded(CoinFactoryError):
    """A search bound was exhausted before a certificate was found."""

    def __init__(self, cap: int, message: str = ""):
        self.cap = cap
        super().__init__(message or f"no certificate found within cap {cap}")


class PoleAtPoint(CoinFactoryError):
    """A rational function was evaluated where its denominator vanishes."""


class DivisionByZero(CoinFactoryError):
    """Division by the zero polynomial or zero rational function."""


class NonHaltingState(CoinFactoryError):
    """A reachable automaton state cannot reach any final state."""

    def __init__(self, state: int):
        self.state = state
        super().__init__(f"state {state} is reachable but cannot reach a final state")


class StepCapExceeded(CoinFactoryError):
    """A finite-automaton run consumed the step budget without halting."""

    def __init__(self, cap: int):
        self.cap = cap
        super().__init__(f"run did not halt within {cap} steps")


class DidNotHalt(CoinFactoryError):
    """A pushdown run consumed the step budget with a non-empty stack.

    For machines driven by recurrent walks with heavy-tailed passage times
    this is a legitimate outcome, not a bug; harnesses tally it separately.
    """

    def __init__(self, step_cap: int, steps: int | None = None):
        self.step_cap = step_cap
        self.steps = steps if steps is not None else step_cap
        super().__init__(f"stack not empty after {self.steps} steps (cap {step_cap})")


class UndefinedFinal(CoinFactoryError):
    """A pushdown stack emptied in a state that carries no output label."""

    def __init__(self, state: int):
        self.state = state
        super().__init__(f"stack emptied in unlabeled state {state}")


class NotAlmostSurelyHalting(CoinFactoryError):
    """Some (stack symbol, state) pair pops with probability bounded away
    from one, so the machine value is undefined as a coin probability."""

    def __init__(self, symbol: int, state: int, goodness: float):
        self.symbol = symbol
        self.state = state
        self.goodness = goodness
        super().__init__(
            f"pop probability from (symbol {symbol}, state {state}) is "
            f"{goodness:.12g} < 1"
        )


class IterCapExceeded(CoinFactoryError):
    """The fixed-point solver hit its iteration budget before the requested
    tolerance was reached."""

    def __init__(self, iter_cap: int, delta: float):
        self.iter_cap = iter_cap
        self.delta = delta
        super().__init__(
            f"fixed point not within tolerance after {iter_cap} iterations "
            f"(last update {delta:.3g})"
        )


class NotAProbabilityVector(CoinFactoryError):
    """A list of target functions does not sum identically to one, or some
    entry is not strictly between zero and one on the open simplex."""


class AlphabetMismatch(CoinFactoryError):
    """Composed components disagree about alphabet sizes."""


class UnknownName(CoinFactoryError):
    """An unrecognized built-in machine name."""


class LengthMismatch(CoinFactoryError):
    """A word has the wrong length or weight for the requested operation."""


class ExpressionError(CoinFactoryError):
    """A target-function expression failed to parse."""

    def __init__(self, message: str, position: int):
        self.position = position
        super().__init__(f"{message} (at position {position})")


class DocumentError(CoinFactoryError):
    """A machine document failed to parse or validate."""
