"""Exception types shared across the package.

The CLI maps these onto exit codes: configuration problems exit 1, data
problems exit 2, numerical failures exit 3.
"""


class EgpdError(Exception):
    """Base class for all package errors."""


class DomainError(EgpdError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ParameterError(EgpdError, ValueError):
    """A distribution parameter violates its admissibility constraints."""


class ConfigError(EgpdError, ValueError):
    """A model or run configuration is inconsistent or unsupported."""


class DataError(EgpdError, ValueError):
    """Input data violate the contract of a pipeline stage."""


class IngestError(DataError):
    """Raw input could not be ingested (malformed beyond tolerance)."""


class NumericalError(EgpdError, RuntimeError):
    """A numerical routine failed to converge or produced non-finite values."""

    def __init__(self, message: str, residual: float | None = None):
        super().__init__(message)
        self.residual = residual


class FitError(EgpdError, RuntimeError):
    """Model fitting failed; carries the last stable state when available."""

    def __init__(self, message: str, state=None):
        super().__init__(message)
        self.state = state


class UnsupportedFeatureError(EgpdError, NotImplementedError):
    """A documented limitation was hit (e.g. out-of-sample standard errors)."""
