"""Exception hierarchy.

Everything raised on purpose by this package derives from
:class:`QuadShiftError`, so callers (and the CLI) can separate modelling
failures from programming errors.
"""


class QuadShiftError(Exception):
    """Base class for all package errors."""


class ConfigError(QuadShiftError):
    """A scenario config is malformed; the message names the offending field."""

    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field}: {message}" if field else message)


class PacketTooWide(QuadShiftError):
    """Initial packet support does not fit on the grid."""


class NonFiniteState(QuadShiftError):
    """An integrator produced NaN or Inf; reduce the step size."""


class CrossCheckFailure(QuadShiftError):
    """Differential and closed-form phase accumulators disagree."""


class QuadratureFailure(QuadShiftError):
    """Adaptive quadrature could not reach its tolerance."""


class SolverBreakdown(QuadShiftError):
    """A pivot in banded elimination collapsed relative to its row scale."""


class BoundaryLeak(QuadShiftError):
    """Probability reached the grid margins; the result cannot be trusted."""


class AliasedShift(QuadShiftError):
    """A spectral translation is too large for the periodic grid."""


class UnderResolved(QuadShiftError):
    """The momentum distribution is too narrow for the momentum lattice."""
