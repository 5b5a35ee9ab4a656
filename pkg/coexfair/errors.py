from __future__ import annotations


class BaseCoexfairException(Exception):
    """This is a generic coexfair exception."""


class ConfigError(BaseCoexfairException, ValueError):
    """This exception is raised when a scenario file or command line cannot be turned into a valid scenario."""

    def __init__(self, message: str, key: str | None = None):
        super().__init__(message)
        self.key = key


class DomainError(BaseCoexfairException, ValueError):
    """This exception is raised when a probability argument lies outside the domain of a model equation."""


class NegativeRegion(BaseCoexfairException):
    """This exception is raised when the LAA defer period is shorter than the Wi-Fi DIFS."""


class NonIntegerRegion(BaseCoexfairException):
    """This exception is raised when T_d - DIFS is not a whole number of backoff slots."""


class NoConvergence(BaseCoexfairException):
    """This exception is raised when the fixed-point iteration exhausts its iteration budget."""

    def __init__(self, iterations: int, residual: float, message: str | None = None):
        super().__init__(
            message or f"fixed point not reached after {iterations} iterations, residual {residual:.3e}"
        )
        self.iterations = iterations
        self.residual = residual


class ObjectiveUndefined(BaseCoexfairException):
    """This exception is raised when a fairness objective is -inf across the whole search domain."""


class InvalidHorizon(BaseCoexfairException, ValueError):
    """This exception is raised when a simulation horizon is missing, doubled or too short."""


class SimulationBatchError(BaseCoexfairException):
    """This exception wraps a failure of one element of a simulation batch."""

    def __init__(self, index: int, cause: BaseException):
        super().__init__(f"simulation #{index} failed: {cause}")
        self.index = index
        self.cause = cause


NUMERICAL_ERRORS = (DomainError, NegativeRegion, NonIntegerRegion, NoConvergence, ObjectiveUndefined)
