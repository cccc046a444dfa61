"""Exception types shared across the package."""


class TricritError(Exception):
    """Base class for all package errors."""


class ValidationError(TricritError, ValueError):
    """Input failed a structural or physical invariant."""


class DimensionError(ValidationError):
    """Operands have incompatible qubit counts or matrix sizes."""


class CapacityError(TricritError):
    """Requested size exceeds the supported exhaustive-enumeration range."""
