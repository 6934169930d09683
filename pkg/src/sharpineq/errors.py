"""Exception types shared across the package."""


class DomainError(ValueError):
    """A function argument lies outside the mathematical domain."""


class ValidityError(ValueError):
    """Parameters violate a validity bracket; the message names the bracket."""


class ConvergenceError(RuntimeError):
    """An iterative computation failed to reach the requested tolerance.

    Carries the best estimate produced so far so callers can inspect it.
    """

    def __init__(self, message: str, best_estimate: float | None = None):
        super().__init__(message)
        self.best_estimate = best_estimate


class CertificateError(RuntimeError):
    """A minimization result could not be certified as a true minimum."""


class ConfigError(ValueError):
    """A request pairs an operation with options it does not accept."""


class NumericalError(RuntimeError):
    """Linear algebra failed beyond repair; the message records what was tried."""
