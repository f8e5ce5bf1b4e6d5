"""Exception hierarchy shared by all modules."""


class EERDError(Exception):
    """Base class for every error raised by the package."""


class DomainError(EERDError, ValueError):
    """An argument lies outside the domain of a model function."""


class HypothesisViolation(EERDError):
    """A structural hypothesis on the model functions does not hold."""


class PositivityError(EERDError, ValueError):
    """A state component is not strictly positive where it must be."""


class ChargeCompatibilityError(EERDError, ValueError):
    """The state carries a nonzero net charge."""


class BandError(EERDError, ValueError):
    """The equilibrium energy lies outside the admissible band [c_u, C_u]."""


class SolverError(EERDError, RuntimeError):
    """A linear solve failed."""


class StepFailure(EERDError, RuntimeError):
    """The time integrator could not produce an admissible step."""

    def __init__(self, message, t=None):
        super().__init__(message)
        self.t = t


class InsufficientSamples(EERDError, ValueError):
    """A trajectory check received too few samples."""


class GenerationFailure(EERDError, RuntimeError):
    """Random admissible state generation exhausted its retries."""


class ConfigError(EERDError, ValueError):
    """Malformed or inconsistent configuration file."""
