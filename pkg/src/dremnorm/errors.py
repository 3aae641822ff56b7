"""Exception types shared across the package."""


class ConfigError(ValueError):
    """Invalid configuration or precondition violation (CLI exit code 1)."""


class NumericalError(RuntimeError):
    """Numerical failure during a run: divergence, non-finite update,
    or a violated runtime invariant (CLI exit code 2)."""
