"""Exception hierarchy shared by all ratcalc modules.

The CLI maps these onto exit codes: bad input or geometry 1,
failed separator search 2, convergence failure 3.
"""


class CalcError(Exception):
    """Base class for all errors raised by this package."""


class InputError(CalcError):
    """Malformed user input (CLI configs, JSON payloads)."""


class ValidationError(CalcError):
    """A structural precondition does not hold (degrees, root spacing, shapes)."""


class PoleError(CalcError):
    """Evaluation requested at (or too close to) a pole."""

    def __init__(self, msg, where=None):
        super().__init__(msg)
        self.where = where


class RootSolveError(CalcError):
    """Polynomial root finding failed to meet the residual tolerance."""

    def __init__(self, msg, residuals=None):
        super().__init__(msg)
        self.residuals = residuals


class ClearanceError(CalcError):
    """A level or sample point sits too close to a critical point/value."""

    def __init__(self, msg, offending=None, cond=None):
        super().__init__(msg)
        self.offending = offending
        self.cond = cond


class WindowTooSmallError(CalcError):
    """A traced level curve leaves the requested window."""


class DomainError(CalcError):
    """Evaluation outside the disc of validity of a series representation."""


class NoSeparatorError(CalcError):
    """Best-effort separator search exhausted its candidates."""


class ConvergenceError(CalcError):
    """An iterative or truncated computation missed its tolerance."""

    def __init__(self, msg, achieved=None):
        super().__init__(msg)
        self.achieved = achieved
