"""Exception types shared across the package."""


class ValidationError(ValueError):
    """Raised when an input violates a documented precondition."""


class RefusalError(ValueError):
    """Raised when a request is well-formed but outside the supported domain,
    e.g. a group size below the certified range or an enumeration that would
    not terminate at desk scale."""
