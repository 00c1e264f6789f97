"""Exception hierarchy shared by all modules.

The CLI maps :class:`DomainError` (and ``ValueError`` in general) to exit
status 1 and :class:`NumericalError` subclasses to exit status 2.
"""


class NLGreenError(Exception):
    """Base class for library errors."""


class DomainError(NLGreenError, ValueError):
    """An argument lies outside the region where a formula is defined."""


class PoleError(DomainError):
    """Evaluation exactly at a singularity (lattice point, K(1), ...)."""


class ShapeError(NLGreenError, ValueError):
    """Grids that must be co-sampled are not."""


class NumericalError(NLGreenError, ArithmeticError):
    """Base for failures of a numerical procedure."""


class AccuracyError(NumericalError):
    """An iterative procedure failed to reach its accuracy target."""


class BlowUpError(NumericalError):
    """Integration could not proceed (step-size underflow or overflow)."""

    def __init__(self, message, t_last=None):
        super().__init__(message)
        self.t_last = t_last


class EvaluationError(NumericalError):
    """A user-supplied evaluator returned a non-finite value."""


class CalibrationError(NumericalError):
    """Every calibration start failed."""
