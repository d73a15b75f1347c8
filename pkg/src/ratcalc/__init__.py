"""Multicentric calculus with a rational function as the variable.

Scalar functions are rewritten as vector-valued functions of w = r(z)
through the rational partition of unity attached to the numerator roots
of r.  The package covers the supporting lemniscate geometry, the
representation engine, the associated commutative Banach algebra, matrix
functional calculus, a power-series Sylvester solver and K-spectral
constant estimation, plus a CLI emitting JSON/CSV/SVG artifacts.
"""

from .cpoly import Polynomial, lagrange_basis, poly_derivative, poly_eval, poly_roots
from .errors import (
    CalcError,
    ClearanceError,
    ConvergenceError,
    DomainError,
    InputError,
    NoSeparatorError,
    PoleError,
    RootSolveError,
    ValidationError,
    WindowTooSmallError,
)
from .ratfun import DeltaBasis, RationalFunction

__version__ = "0.1.0"

__all__ = [
    "Polynomial",
    "RationalFunction",
    "DeltaBasis",
    "poly_eval",
    "poly_roots",
    "poly_derivative",
    "lagrange_basis",
    "CalcError",
    "InputError",
    "ValidationError",
    "PoleError",
    "RootSolveError",
    "ClearanceError",
    "WindowTooSmallError",
    "DomainError",
    "NoSeparatorError",
    "ConvergenceError",
    "__version__",
]
