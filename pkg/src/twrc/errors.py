class TwrcError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(TwrcError, ValueError):
    """Argument outside the mathematical domain of a function."""


class DegeneratePower(TwrcError, ValueError):
    """A terminal power is zero where a positive power is required."""


class NonConvergence(TwrcError, RuntimeError):
    """An iterative numerical routine ran out of budget before meeting its tolerance."""


class BracketError(TwrcError, ValueError):
    """A bracketing search was given an interval without the required sign pattern."""


class InfeasibleSumRate(TwrcError, ValueError):
    """Requested sum rate exceeds the sum of the link capacities."""
