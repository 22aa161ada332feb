"""Exception hierarchy shared by all modules."""


class MoutardError(Exception):
    """Base class for every error raised by this package."""


class DomainError(MoutardError, ValueError):
    """Argument outside the domain where a quantity is defined."""


class BoundaryError(DomainError):
    """Evaluation requested on the unit circle |lambda| = 1."""


class SingularPoint(DomainError):
    """Evaluation requested on (or too close to) a singular circle."""


class StencilError(DomainError):
    """A finite-difference stencil touches an excluded band."""


class PathError(DomainError):
    """An integration path leaves its connected component."""


class ConfigError(MoutardError, ValueError):
    """Invalid user configuration."""


class NonConvergence(MoutardError, ArithmeticError):
    """A quadrature or extrapolation did not reach its tolerance."""


class DivisionByZeroOmega(MoutardError, ZeroDivisionError):
    """The seed potential omega_{f,f*} vanishes at the evaluation point."""


class SeedInvalid(MoutardError):
    """A Moutard seed fails its generalized-analytic preconditions."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report
