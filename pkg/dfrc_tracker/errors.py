"""Exception hierarchy for DFRC Tracker."""


class DfrcTrackerError(Exception):
    """Base class for all errors raised by this package."""


class DimensionError(DfrcTrackerError, ValueError):
    """Operands with incompatible shapes."""


class SingularMatrixError(DfrcTrackerError):
    """
    Matrix is singular or too ill-conditioned to invert.

    Args:
        condition: 1-norm condition estimate (inf when the factorization failed).
        cap: The configured condition cap that was exceeded.
    """

    def __init__(self, condition: float, cap: float):
        self.condition = condition
        self.cap = cap
        super().__init__(
            f"Matrix is ill-conditioned: condition {condition:.3e} exceeds cap {cap:.3e}"
        )


class ConfigError(DfrcTrackerError):
    """Invalid or unknown scenario configuration."""


class FilterDivergence(DfrcTrackerError):
    """The filter state became non-finite or left the physical domain."""


class OutputError(DfrcTrackerError):
    """
    Writing an artifact failed.

    Args:
        path: Destination that could not be written.
        reason: Underlying error message.
    """

    def __init__(self, path, reason: str):
        self.path = path
        super().__init__(f"Cannot write {path}: {reason}")
