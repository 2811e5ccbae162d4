"""
Exceptions raised by the one-bit covariance recovery code.

Every error derives from OneBitError and, where one fits, from the matching
builtin so callers can catch either.
"""


class OneBitError(Exception):
    """Base class for all errors raised by the core app."""


class DomainError(OneBitError, ValueError):
    """Argument outside the domain of a special function or formula."""


class InfeasibleParametersError(OneBitError, ValueError):
    """Effective parameters violate |p_l| < p0 or p0 > 0."""


class NonPSDModelError(OneBitError, ValueError):
    """Autocorrelation sequence does not define a PSD Toeplitz matrix."""


class ExponentOverflowError(OneBitError, OverflowError):
    """alpha^2 / (4 beta) exceeds the exponent cap; d too large for (p0, p_l)."""


class PadeDegeneracyError(OneBitError, ArithmeticError):
    """Hankel system for the Padé denominator is singular or ill-conditioned."""


class ApproximationBreakdownError(OneBitError, ArithmeticError):
    """Approximated forward model left the admissible range [-1, 1]."""


class UnidentifiableVarianceError(OneBitError, ValueError):
    """Sample mean and threshold mean do not identify p0."""


class ConvergenceError(OneBitError, RuntimeError):
    """Optimizer failed from every start point."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or []


class MissingInputsError(OneBitError, ValueError):
    """Input realizations were requested but not retained in the dataset."""
