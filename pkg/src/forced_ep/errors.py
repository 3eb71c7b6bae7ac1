"""Exception types shared across the package."""


class DomainError(ValueError):
    """A group element or algebra vector left the chart of the retraction."""


class ParameterError(ValueError):
    """Invalid physical parameters (non-positive inertia, bad shapes, ...)."""


class ConfigError(ValueError):
    """Malformed or inconsistent run configuration."""


class UnknownTableau(KeyError):
    """Requested Butcher tableau name is not shipped."""


class NonConvergence(RuntimeError):
    """Newton iteration failed to reach the requested residual tolerance.

    Carries the iteration count and the last residual norm so callers can
    report where a run died.
    """

    def __init__(self, message, iterations, residual_norm):
        super().__init__(message)
        self.iterations = iterations
        self.residual_norm = residual_norm


class SingularJacobian(RuntimeError):
    """The finite-difference Jacobian of a Newton solve was singular."""
