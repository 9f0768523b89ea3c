"""Exception types shared across the package."""


class SewError(Exception):
    """Base class for all errors raised by :mod:`sew`."""


class ConfigurationError(SewError, ValueError):
    """Unsupported model, malformed selection or inconsistent layout."""


class DomainError(SewError, ValueError):
    """An argument lies outside the domain of the operation."""


class HypothesisViolation(SewError, ValueError):
    """A theorem hypothesis (e.g. gamma > d) does not hold for the inputs."""


class CapabilityError(SewError, ValueError):
    """The request is well posed but beyond what the method handles reliably."""


class SpectrumExhausted(SewError, ValueError):
    """The supplied spectrum is too short; rebuild it with a larger ``n_max``."""

    def __init__(self, message, needed=None):
        super().__init__(message)
        self.needed = needed


class ConvergenceError(SewError, RuntimeError):
    """An iterative solver hit its iteration cap; ``best`` holds the best value seen."""

    def __init__(self, message, best):
        super().__init__(message)
        self.best = best
