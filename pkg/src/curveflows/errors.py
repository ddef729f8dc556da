"""Exception hierarchy shared by all curveflows modules.

The CLI maps these onto exit codes: ConfigError / BadFormat -> 2,
NumericalError subclasses -> 3, OSError -> 4.
"""


class CurveFlowsError(Exception):
    """Base class for all curveflows errors."""


class ConfigError(CurveFlowsError):
    """Invalid run configuration (bad N, dt, unknown curve, ...)."""


class BadFormat(ConfigError):
    """Input file could not be parsed."""


class NumericalError(CurveFlowsError):
    """A numerical validation or stability guard fired."""


class SingularPoint(NumericalError):
    """Curve point too close to (-1, 0, 0), where the eigenvector frame blows up."""


class NoSafeRotation(NumericalError):
    """No rotation can move the sampled curve away from the frame singularity."""


class GaugeResidual(NumericalError):
    """Diagonal part of the gauged connection exceeds tolerance."""


class NonDiagonalMonodromy(NumericalError):
    """Period-transport matrix is not diagonal: curve not closed or under-resolved."""


class FixedPointDiverged(NumericalError):
    """Implicit spectral step: fixed-point iteration failed to converge."""


class UnitaryDrift(NumericalError):
    """Frame left the unitary group faster than the projection tolerance allows."""


class PoleHit(NumericalError):
    """Simple factor evaluated at (or too close to) its pole."""


class Overflow(NumericalError):
    """Frame entries grew beyond the overflow guard (complex spectral parameter)."""


class DegenerateLine(NumericalError):
    """Dressing line collapsed: || E(x,t,alpha)^-1 V || below tolerance."""


class DegenerateSpeed(NumericalError):
    """Curve has a (near-)stationary point; arclength reparametrization undefined."""


class FrameDegenerate(NumericalError):
    """Transported normal frame lost orthonormality."""


class DerivativeNoise(NumericalError):
    """Finite-difference spectral-parameter derivative is not resolution-independent."""


class NotClosed(NumericalError):
    """Sampled data fails the smooth-closure (spectral tail) test."""


class OffSphere(NumericalError):
    """Input points too far from the unit sphere."""


class NonClosedWarning(UserWarning):
    """Reconstructed filament is not x-periodic (curve mean is nonzero)."""
