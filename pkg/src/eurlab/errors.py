"""Exception types shared across the package."""


class DomainError(ValueError):
    """An input falls outside the domain an operation is defined on."""


class UnsupportedDimensionError(DomainError):
    """A construction is not available for the requested dimension."""
