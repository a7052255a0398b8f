"""Exception hierarchy shared by all modules."""


class ParafockError(Exception):
    """Base class for every error raised by this package."""


class ParameterError(ParafockError, ValueError):
    """An argument is outside its admissible range."""


class CapacityError(ParafockError):
    """A requested state space exceeds the configured dimension cap."""


class ValidationError(ParafockError, ValueError):
    """Input data (e.g. a probability vector) failed validation."""


class ConsistencyError(ParafockError):
    """Two independent routes to the same quantity disagreed."""


class ModelConstructionError(ParafockError):
    """A built generator violates probability conservation."""


class DomainError(ParafockError, ValueError):
    """A series was evaluated outside its region of convergence."""


class DegenerateRateError(ParafockError, ValueError):
    """A closed form was requested at a rate combination where it degenerates."""


class DegeneracyError(ParafockError):
    """A spectral method met a (near-)repeated eigenvalue."""

    def __init__(self, message, gap):
        super().__init__(message)
        self.gap = gap


class ConfigError(ParafockError, ValueError):
    """A run configuration is malformed or semantically invalid."""
