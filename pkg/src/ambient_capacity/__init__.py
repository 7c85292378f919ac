"""Capacity bounds and Monte-Carlo estimators for ambient backscatter over multicarrier legacy systems."""

from .errors import (
    AmbientCapacityError,
    ConfigValidationError,
    ConsistencyError,
    CoincidentNodeError,
    DegenerateCircuitError,
    DomainError,
    FrameConditionError,
)
from .frontend import Constellation, standard_constellation
from .mc_engine import CapacityEstimate, TrialPlan
from .oracle import FrameConfig
from .scenario import Scenario, make_scenario

__version__ = "0.1.0"

__all__ = [
    "AmbientCapacityError",
    "CapacityEstimate",
    "CoincidentNodeError",
    "ConfigValidationError",
    "ConsistencyError",
    "Constellation",
    "DegenerateCircuitError",
    "DomainError",
    "FrameConditionError",
    "FrameConfig",
    "Scenario",
    "TrialPlan",
    "make_scenario",
    "standard_constellation",
]
