"""Exception hierarchy shared across the package."""


class AmptreeError(Exception):
    """Base class for all errors raised by amptree."""


class InputShapeError(AmptreeError, ValueError):
    """An input's length or arity does not match what the operation needs."""


class RangeError(AmptreeError, ValueError):
    """A parameter lies outside the admissible range of a construction."""


class WeightError(AmptreeError, ValueError):
    """Mixture weights are negative or do not sum to one."""


class DegenerateInputError(AmptreeError, ValueError):
    """The input makes the operation meaningless (e.g. every point is fixed)."""


class CapacityError(AmptreeError):
    """A documented size cap was exceeded.

    Carries best-effort results where the operation can report them
    (``best_tree``, ``best_value``).
    """

    def __init__(self, message, best_tree=None, best_value=None):
        super().__init__(message)
        self.best_tree = best_tree
        self.best_value = best_value


class InconsistentFixedPointError(AmptreeError, ValueError):
    """A claimed fixed point leaves a nonzero polynomial-division remainder."""


class InvalidStaircaseError(AmptreeError, ValueError):
    """A staircase specification violates its invariants."""
