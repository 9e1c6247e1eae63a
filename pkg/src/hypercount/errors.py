"""Exception hierarchy shared by all hypercount modules."""


class HypercountError(Exception):
    """Base class for every error raised by this package."""


class NotAPrimePower(HypercountError, ValueError):
    pass


class TooLarge(HypercountError, ValueError):
    pass


class DivisionByZero(HypercountError, ZeroDivisionError):
    pass


class Disconnected(HypercountError, ValueError):
    pass


class SelfLoop(HypercountError, ValueError):
    pass


class NoCycles(HypercountError, ValueError):
    pass


class TooManyEdges(HypercountError, ValueError):
    pass


class MissingVariable(HypercountError, KeyError):
    pass


class BudgetExceeded(HypercountError, RuntimeError):
    pass


class NotACone(HypercountError, ValueError):
    pass


class InvariantViolation(HypercountError, AssertionError):
    """An internal mathematical invariant failed; indicates a counting bug."""


class CheckpointError(HypercountError, RuntimeError):
    pass


class CorruptCheckpoint(CheckpointError):
    pass


class SchemeMismatch(CheckpointError):
    pass


class DuplicateAbscissa(HypercountError, ValueError):
    pass


class DivisibilityViolation(InvariantViolation):
    pass


class TooFewPoints(HypercountError, ValueError):
    pass
