"""Exception types shared across the toolkit."""


class ChebcapError(Exception):
    """Base class for all toolkit errors."""


class ValidationError(ChebcapError):
    """Invalid input data or configuration.

    `field` optionally names the offending field/path for config diagnostics.
    """

    def __init__(self, message, *, field=None):
        self.field = field
        if field is not None:
            message = f"{field}: {message}"
        super().__init__(message)


class SolverError(ChebcapError):
    """A numerical solve failed or did not meet its certified tolerance.

    `gap_index` is set when a specific gap of an interval union is to blame.
    """

    def __init__(self, message, *, gap_index=None, detail=None):
        self.gap_index = gap_index
        self.detail = detail
        if gap_index is not None:
            message = f"{message} (gap index {gap_index})"
        super().__init__(message)
