"""Exception types shared across the toolkit."""


class NeurochanError(Exception):
    """Base class for all toolkit errors."""


class DimensionError(NeurochanError, ValueError):
    """Matrix or vector shapes do not conform."""


class DomainError(NeurochanError, ValueError):
    """A scalar or structural argument is outside its admissible range."""


class CapacityError(NeurochanError, ValueError):
    """An enumeration would exceed the configured size guard."""


class RankError(NeurochanError, ValueError):
    """A matrix that must have full rank is (numerically) rank deficient."""


class InfeasibleError(NeurochanError, ValueError):
    """The requested object does not exist under the stated constraints."""


class InvalidLiftError(NeurochanError, ValueError):
    """A supplied lift does not reproduce the drift matrix."""


class UnsupportedError(NeurochanError, ValueError):
    """The requested case is outside the supported problem class."""


class DivergenceError(NeurochanError, RuntimeError):
    """A simulation left the admissible state region."""


class ConfigError(NeurochanError, ValueError):
    """An experiment configuration is missing or malformed."""
