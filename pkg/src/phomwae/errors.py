"""Exception types shared across the package."""


class InputError(ValueError):
    """Malformed or out-of-contract input (bad shapes, NaNs, bad CSV rows)."""


class NumericalError(ArithmeticError):
    """Training diverged or produced non-finite values."""


class UsageError(RuntimeError):
    """API misuse, e.g. back-propagating through a tape from other parameters."""
