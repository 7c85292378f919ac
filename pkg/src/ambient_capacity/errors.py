"""Exception hierarchy shared by the simulator."""


class AmbientCapacityError(Exception):
    """Base class for every error raised by this package."""


class DomainError(AmbientCapacityError, ValueError):
    """Argument outside the domain of a function."""


class DegenerateCircuitError(AmbientCapacityError, ValueError):
    """Impedance/reflection mapping hits a singular denominator."""


class CoincidentNodeError(AmbientCapacityError, ValueError):
    """Two nodes of the network geometry fall on the same point."""


class FrameConditionError(AmbientCapacityError, ValueError):
    """A cyclic-prefix, IBI or truncation inequality does not hold."""

    def __init__(self, inequality: str) -> None:
        super().__init__(inequality)
        self.inequality = inequality


class ConsistencyError(AmbientCapacityError, ArithmeticError):
    """An internal numerical identity failed."""


class ConfigValidationError(AmbientCapacityError, ValueError):
    """Scenario configuration, sweep or preset is invalid."""
