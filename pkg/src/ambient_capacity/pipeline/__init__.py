from .quantities import Quantity, available_quantities, get_quantity, parse_quantities
from .runner import RunResult, ScenarioRunner, SweepRunner
from .sweep import (
    FIGURE_IDS,
    SWEEP_VARIABLES,
    CheckResult,
    ReferencePoint,
    SeriesSpec,
    ShapeCheck,
    SweepSpec,
    evaluate_checks,
    figure_preset,
    point_overrides,
)

__all__ = [
    "FIGURE_IDS",
    "SWEEP_VARIABLES",
    "CheckResult",
    "Quantity",
    "ReferencePoint",
    "RunResult",
    "ScenarioRunner",
    "SeriesSpec",
    "ShapeCheck",
    "SweepRunner",
    "SweepSpec",
    "available_quantities",
    "evaluate_checks",
    "figure_preset",
    "get_quantity",
    "parse_quantities",
    "point_overrides",
]
