"""Exception types shared across the library."""


class ConvergenceError(RuntimeError):
    """An iterative numerical routine failed to reach its tolerance."""


class ConfigError(ValueError):
    """An experiment configuration failed validation."""
