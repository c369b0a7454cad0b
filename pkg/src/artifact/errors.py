"""Error types shared across the workbench.

Two failure families matter to callers (and map to CLI exit codes):
bad input (exit 2) and blown resource budgets (exit 3).  Everything else
is an ordinary check failure reported in-band, not an exception.
"""


class WorkbenchError(Exception):
    """Base class for workbench errors."""


class InvalidArgumentError(WorkbenchError):
    """Caller passed something structurally wrong (CLI exit code 2)."""


class ResourceLimitError(WorkbenchError):
    """A configured cap (atoms, nodes, expansions) was exceeded (exit 3).

    The message always names the cap that was hit so callers can raise it.
    """

    def __init__(self, message: str, limit_name: str = "", limit_value: int | None = None):
        super().__init__(message)
        self.limit_name = limit_name
        self.limit_value = limit_value
