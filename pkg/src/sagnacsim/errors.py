"""Exception types shared across the simulator."""


class NumericalFailure(RuntimeError):
    """A computation produced non-finite or internally inconsistent values."""


class CutoffTooSmallError(ValueError):
    """Truncated Fock computation leaked probability past its cutoff."""

    def __init__(self, message: str, suggested_cutoff: int):
        super().__init__(message)
        self.suggested_cutoff = suggested_cutoff


class ResourceLimitError(RuntimeError):
    """Requested brute-force computation exceeds the configured size bound."""


class CalibrationError(RuntimeError):
    """Numeric and analytic tracks disagree beyond the accepted spread."""


class NoOptimumError(RuntimeError):
    """Objective was non-finite everywhere on the search interval."""


class ConfigError(ValueError):
    """Invalid or unknown entry in a scenario configuration document."""

    def __init__(self, message: str, key: str | None = None):
        super().__init__(message)
        self.key = key
