"""Exception types shared across the toolkit."""


class DecoyBB84Error(Exception):
    """Base class for all toolkit errors."""


class ConstraintViolation(DecoyBB84Error):
    """An intensity-profile or parameter inequality does not hold."""


class DomainError(DecoyBB84Error):
    """An argument lies outside the mathematical domain of an operation."""


class DegenerateChannel(DecoyBB84Error):
    """All gains vanish; error rates are undefined."""


class InsufficientData(DecoyBB84Error):
    """A tally has no detections for a pulse type that statistics require."""


class Infeasible(DecoyBB84Error):
    """The attack cannot reproduce the target gain for any blocking fraction.

    Carries the achievable gain range so callers can report how far off the
    target is.
    """

    def __init__(self, message, min_gain, max_gain, target):
        super().__init__(message)
        self.min_gain = min_gain
        self.max_gain = max_gain
        self.target = target


class InvalidState(DecoyBB84Error):
    """A density matrix or cq state violates its structural invariants."""


class WrongModeLabels(DecoyBB84Error):
    """A mode transformation was applied to a state with unexpected labels."""


class AssertionFailure(DecoyBB84Error):
    """A verification suite found a counterexample.

    ``counterexample`` holds a plain-text description (matrix dumps use
    row-major "re,im" pairs).
    """

    def __init__(self, message, counterexample=None):
        super().__init__(message)
        self.counterexample = counterexample
