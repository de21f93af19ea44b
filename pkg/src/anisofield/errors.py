"""Exception types shared across the package."""


class AnisoFieldError(Exception):
    """Base class for all package errors."""


class DomainError(AnisoFieldError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ConfigError(AnisoFieldError, ValueError):
    """Invalid run configuration (CLI exits with code 2 on this)."""


class BackendError(AnisoFieldError, ImportError):
    """The requested compute backend is unavailable."""


class ToleranceNotReached(AnisoFieldError, ArithmeticError):
    """A truncated series hit its term cap before meeting the tolerance."""


class QuadratureFailure(AnisoFieldError, ArithmeticError):
    """Adaptive quadrature did not converge within its refinement budget."""


class SpecialFunctionError(AnisoFieldError, ArithmeticError):
    """A special-function evaluation produced a non-finite result."""


class NotCertifiedError(AnisoFieldError):
    """A kernel without a positive-definiteness certificate was passed to the sampler."""


class EigenFailure(AnisoFieldError, ArithmeticError):
    """The symmetric eigensolver failed to converge."""


class FactorizationError(AnisoFieldError, ArithmeticError):
    """The covariance factor does not reproduce the matrix within tolerance."""


class OffGridError(AnisoFieldError, ValueError):
    """A rectangle corner does not coincide with any grid point."""


class DegenerateWitnessError(AnisoFieldError):
    """The analytic witness gap is too small for the configured Monte Carlo budget."""
