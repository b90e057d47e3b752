"""Exception types shared across the package."""


class NumericError(ValueError):
    """A computation is undefined for the given numbers (zero gains, unreachable targets)."""
