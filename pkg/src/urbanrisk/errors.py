"""Exception types shared across the package."""

from __future__ import annotations


class UrbanRiskError(Exception):
    """Base class for package errors."""


class ConfigurationError(UrbanRiskError):
    """Invalid generation or service configuration."""


class RecordValidationError(UrbanRiskError):
    """One or more records failed validation; carries per-record diagnostics."""

    def __init__(self, diagnostics: list[tuple[str, str]]):
        self.diagnostics = diagnostics
        lines = "; ".join(f"{rid}: {reason}" for rid, reason in diagnostics)
        super().__init__(f"{len(diagnostics)} invalid record(s): {lines}")


class NotTrainedError(UrbanRiskError):
    """Operation requires a trained forecaster."""


class StaleLayerError(UrbanRiskError):
    """Attempt to publish a layer whose version is not newer than the current one."""
