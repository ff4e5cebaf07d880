"""Exception hierarchy shared by every module.

The CLI maps the three top-level families onto exit codes:
``ConfigError`` -> 2, ``NumericalError`` -> 3, ``DomainViolation`` -> 4.
"""


class CavityError(Exception):
    """Base class for all errors raised by paracavity."""


class ConfigError(CavityError, ValueError):
    pass


class DomainViolation(CavityError, ValueError):
    """An input lies outside the region where the operation is defined."""


class NumericalError(CavityError, ArithmeticError):
    """A numerical procedure failed to reach its stated tolerance."""


# geometry
class RimHit(DomainViolation):
    """The ray meets the rim circle, where reflection is undefined."""


class NoHit(DomainViolation):
    pass


class OffSurface(DomainViolation):
    pass


# classical dynamics
class ZeroMomentum(DomainViolation):
    pass


class ForbiddenRegion(DomainViolation):
    pass


class NotPlanar(DomainViolation):
    pass


class AbortOnDrift(NumericalError):
    pass


# actions
class EmptyInterval(DomainViolation):
    pass


# periodic orbits
class NoSolution(NumericalError):
    pass


class NonConvergence(NumericalError):
    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class ClosureFailure(NumericalError):
    pass


# special functions
class PoleInB(DomainViolation):
    pass


class DomainExceeded(DomainViolation):
    pass


# quantum
class QuadratureNotConverged(NumericalError):
    pass


class GridTooCoarse(UserWarning):
    """Refined eigenpair scan disagrees with the coarse one."""
