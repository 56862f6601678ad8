"""Symbolic-numeric toolkit for the time-fractional porous medium equation
and its dual variant: Riemann-Liouville calculus, symmetry algebras,
exact invariant solutions, and an explicit finite-difference solver."""

from .errors import (AccuracyError, DomainError, GammaPoleError, InstabilityError,
                     NumericalError, PreconditionError, UnsupportedFormError)

__version__ = "0.1.0"

__all__ = [
    "AccuracyError", "DomainError", "GammaPoleError", "InstabilityError",
    "NumericalError", "PreconditionError", "UnsupportedFormError",
]
