"""Exception classes shared across the package."""


class ChainError(Exception):
    """Base class for all errors raised by chiralchain."""


class ParameterError(ChainError, ValueError):
    """Invalid physical or numerical parameters (bad N/M, malformed states, ...)."""


class CapacityError(ChainError):
    """Requested basis dimension exceeds the configured cap."""


class NumericsError(ChainError):
    """Non-finite values or other numerical breakdown in a computation."""


class IntegratorError(ChainError):
    """Cross-check between independent propagation methods failed."""


class ConfigError(ChainError):
    """Run configuration failed to parse or validate."""
