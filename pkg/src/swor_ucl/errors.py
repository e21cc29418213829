"""Exception types raised by the library."""


class DomainError(ValueError):
    """An argument lies outside the domain of the requested quantity."""


class SingularInputError(DomainError):
    """The function is singular at the requested point."""


class InfiniteDivergenceError(DomainError):
    """The binary relative entropy is infinite for the given pair."""


class ScaleError(ValueError):
    """The instance is too large for a brute-force routine."""


class InfeasibleError(RuntimeError):
    """No admissible value meets the requested target."""
