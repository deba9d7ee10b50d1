from typing import List, Optional


class FracCauchyError(Exception):
    """Base class for all library errors."""

    def __init__(self, message):
        super().__init__(message)
        self.message = message


class ParameterError(FracCauchyError):
    """Raised when a parameter lies outside its admissible range."""


class CapacityError(FracCauchyError):
    """Raised when more modes are requested than a domain or cache provides."""

    def __init__(self, message, requested: int = 0, available: int = 0):
        super().__init__(message)
        self.requested = requested
        self.available = available


class InputError(FracCauchyError):
    """Raised when a user-supplied evaluator returns non-finite samples."""


class NumericError(FracCauchyError):
    """Raised when an adaptive scheme fails to converge.

    Carries the best estimate reached so callers can report it.
    """

    def __init__(self, message, estimate: Optional[float] = None, abserr: Optional[float] = None):
        super().__init__(message)
        self.estimate = estimate
        self.abserr = abserr


class InsufficientDataError(FracCauchyError):
    """Raised when a fit has too few usable samples."""


class ReferenceDistributionError(FracCauchyError):
    """Raised when a reference density fails to normalize."""


class ConfigDiagnostic:
    """One field-level problem found while validating a run configuration."""

    def __init__(self, field: str, message: str):
        self.field = field
        self.message = message

    def __str__(self) -> str:
        return f"{self.field}: {self.message}"

    def __repr__(self) -> str:
        return f"ConfigDiagnostic({self.field!r}, {self.message!r})"


class ConfigError(FracCauchyError):
    """Raised when a run configuration fails validation."""

    def __init__(self, diagnostics: List[ConfigDiagnostic]):
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(str(d) for d in self.diagnostics) or "invalid configuration")


class RunError(FracCauchyError):
    """Raised when a run fails; names the method and grid point involved."""

    def __init__(self, message, method: Optional[str] = None, point: Optional[tuple] = None):
        super().__init__(message)
        self.method = method
        self.point = point
