"""Exception hierarchy shared across the package.

The CLI maps these onto process exit codes: usage errors exit 2, capacity
errors exit 3, numerical failures exit 4.
"""


class UsageError(ValueError):
    """Bad input: invalid parameter values, malformed configs, unknown keys."""


class ReportOutOfRangeError(UsageError):
    """A reported data size falls outside the identifiable range of the mechanism."""


class DegenerateFitError(UsageError):
    """A curve fit has no unique solution (e.g. every sample at the same size)."""


class CapacityError(RuntimeError):
    """Problem size exceeds the exhaustive-enumeration cap."""


class NumericalError(RuntimeError):
    """A numerical procedure failed: iteration cap hit, certificate check failed."""
