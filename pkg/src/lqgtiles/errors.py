"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: ConfigError -> 2, NumericError -> 3,
CapacityError -> 4.
"""


class LqgError(Exception):
    pass


class DomainError(LqgError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class ConfigError(LqgError):
    """Invalid or contradictory run configuration."""


class NumericError(LqgError):
    """Numerical failure (factorization, spectral synthesis, ...)."""


class CapacityError(LqgError):
    """A configured resource cap was exceeded."""
