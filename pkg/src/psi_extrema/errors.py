"""Exception types shared across the package."""


class ResourceLimitError(RuntimeError):
    """A configured size or count cap would be exceeded."""


class PrecisionInfeasibleError(ValueError):
    """The requested precision cannot be reached with the given parameters."""

    def __init__(self, message: str, minimal_cutoff: int | None = None):
        super().__init__(message)
        self.minimal_cutoff = minimal_cutoff


class CheckpointError(RuntimeError):
    """A checkpoint file is corrupt or belongs to a different run."""
