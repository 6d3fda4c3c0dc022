"""Exception types shared across the library."""


class CycleError(ValueError):
    """The precedence edges contain a directed cycle (or a self-loop)."""


class LengthMismatch(ValueError):
    """A reward vector's length differs from the declared objective count."""


class ShapeMismatch(ValueError):
    """Quantile data disagrees on objective, action, or quantile counts."""


class ConfigError(ValueError):
    """A configuration value is missing, malformed, or out of range."""


class EmptySetError(ValueError):
    """An operation that needs a non-empty action set received an empty one."""


class InvalidAction(IndexError):
    """An action index is outside the environment's action set."""


class MissingArtifact(FileNotFoundError):
    """A required trained artifact is absent on disk."""
