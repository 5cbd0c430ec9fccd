class InputError(ValueError):
    """Malformed input: dimension mismatch, bad table, non-homomorphism, ..."""


class BudgetExceeded(RuntimeError):
    """A configured search/enumeration budget was hit before a sound verdict."""
