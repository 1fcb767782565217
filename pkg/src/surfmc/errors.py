"""Exception types shared across the package."""


class InvalidParameterError(ValueError):
    """A parameter is outside the domain an operation is defined on."""


class InfeasibleMatchingError(RuntimeError):
    """The matching problem admits no perfect matching."""


class InconsistentHypothesisError(ValueError):
    """A spacetime hypothesis does not reproduce the observed measurement record."""


class InvalidMoveError(ValueError):
    """A deformation move was requested at a time-boundary slice."""


class ConfigError(ValueError):
    """An experiment configuration failed validation."""


class DecoderInternalError(RuntimeError):
    """A decoder invariant (syndrome/class conservation) was violated."""
