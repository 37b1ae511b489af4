"""Exception types shared across the package."""


class DomainError(ValueError):
    """Argument outside the admissible domain (e.g. |y| > 1)."""


class ParseError(ValueError):
    """Malformed prescription expression; carries the offending position."""

    def __init__(self, message, position):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class PreconditionError(ValueError):
    """A documented hypothesis of an operation does not hold for the inputs."""


class IntegrationError(RuntimeError):
    """The profile integration could not proceed (NaN prescription, step underflow)."""


class BranchRangeError(ValueError):
    """Query outside the integrated radial range of a branch."""
