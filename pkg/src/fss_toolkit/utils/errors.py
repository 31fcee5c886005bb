"""Custom exception types for FSS Toolkit."""

from __future__ import annotations

from typing import Any


class FSSToolkitError(Exception):
    """Base exception for all FSS Toolkit errors."""


class FSSValidationError(FSSToolkitError):
    """Inputs or distribution specs failed validation."""


class CutLocusError(FSSValidationError):
    """A point sits on the cut locus (antipode) of the chart base point."""


class DataFormatError(FSSValidationError):
    """An input file could not be parsed."""

    def __init__(self, message: str, row: int | None = None):
        if row is not None:
            message = f"row {row}: {message}"
        super().__init__(message)
        self.row = row


class NumericalError(FSSToolkitError):
    """A numerical procedure failed."""


class ConvergenceError(NumericalError):
    """An iterative optimizer did not converge."""

    def __init__(self, message: str, diagnostics: dict[str, Any] | None = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class QuadratureError(NumericalError):
    """Numerical integration did not reach the requested tolerance."""


class SingularCovarianceError(NumericalError):
    """A covariance matrix is too ill-conditioned to invert."""


class UnstableHessianError(NumericalError):
    """The Hessian at the mean is not positive definite (smeary or unstable)."""


class RegimeNotDetectedError(NumericalError):
    """A modulation curve shows no rising FSS regime."""


class TargetUnreachableError(NumericalError):
    """A parameter search could not reach its target."""

    def __init__(self, message: str, best: dict[str, float] | None = None):
        super().__init__(message)
        self.best = best or {}
