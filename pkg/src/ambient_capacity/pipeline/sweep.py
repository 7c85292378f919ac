"""
Sweep specifications, figure presets and embedded shape checks.
"""

import logging
import pathlib
from collections.abc import Mapping
from dataclasses import dataclass, field
from typing import Any

import numpy as np
import pandas as pd
import yaml
from omegaconf import DictConfig

from ..config import apply_overrides, config_path, load_scenario_config, validate_config
from ..errors import ConfigValidationError
from ..legacy_capacity import find_local_extrema
from .quantities import parse_quantities

logger = logging.getLogger(__name__)

SWEEP_VARIABLES = ("alpha_sq_db", "d12_ratio", "snr_b_db", "snr_l_db")
REFERENCE_DISTANCES = ("d13", "d14")
CHECK_KINDS = (
    "decreasing",
    "increasing",
    "plateau",
    "interior_minimum",
    "interior_maximum",
    "above",
    "below",
)
FIGURE_IDS = range(3, 12)


@dataclass(frozen=True)
class SeriesSpec:
    label: str
    overrides: Mapping[str, Any] = field(default_factory=dict)


@dataclass(frozen=True)
class ShapeCheck:
    """
    Qualitative expectation on one quantity along the grid, within ``k`` SE.

    ``plateau`` asks for a rising first step and a last step no larger than
    ``k`` SE plus ``rtol`` times the final value.
    """

    quantity: str
    expect: str
    series: tuple[str, ...] = ()
    other: str | None = None
    k: float = 3.0
    rtol: float = 0.0

    def __post_init__(self) -> None:
        if self.expect not in CHECK_KINDS:
            raise ConfigValidationError(f"unknown check '{self.expect}'")
        if self.expect in ("above", "below") and self.other is None:
            raise ConfigValidationError(f"check '{self.expect}' needs 'other'")


@dataclass(frozen=True)
class ReferencePoint:
    """A published value kept next to the table for comparison only."""

    quantity: str
    series: str
    at: float
    value: float


@dataclass(frozen=True)
class SweepSpec:
    variable: str
    grid: tuple[float, ...]
    quantities: tuple[str, ...]
    series: tuple[SeriesSpec, ...] = (SeriesSpec("default"),)
    reference: str = "d13"
    checks: tuple[ShapeCheck, ...] = ()
    reference_point: ReferencePoint | None = None
    title: str = ""

    def __post_init__(self) -> None:
        if self.variable not in SWEEP_VARIABLES:
            raise ConfigValidationError(
                f"sweep variable must be one of {', '.join(SWEEP_VARIABLES)}, got '{self.variable}'"
            )
        grid = np.asarray(self.grid, dtype=np.float64)
        if grid.ndim != 1 or grid.size == 0:
            raise ConfigValidationError("sweep grid must be a nonempty list of numbers")
        if not np.all(np.isfinite(grid)):
            raise ConfigValidationError("sweep grid must be finite")
        steps = np.diff(grid)
        if grid.size > 1 and not (np.all(steps > 0) or np.all(steps < 0)):
            raise ConfigValidationError("sweep grid must be strictly monotone")
        if self.variable == "d12_ratio" and np.any(grid <= 0):
            raise ConfigValidationError("d12_ratio grid must be positive")
        if self.reference not in REFERENCE_DISTANCES:
            raise ConfigValidationError(f"reference must be d13 or d14, got '{self.reference}'")
        labels = [s.label for s in self.series]
        if not labels or len(set(labels)) != len(labels):
            raise ConfigValidationError("series labels must be present and unique")
        parse_quantities(list(self.quantities))
        for check in self.checks:
            for name in filter(None, (check.quantity, check.other)):
                if name not in self.quantities:
                    raise ConfigValidationError(f"check on '{name}' which the sweep does not compute")
            unknown = set(check.series) - set(labels)
            if unknown:
                raise ConfigValidationError(f"check names unknown series: {sorted(unknown)}")
        object.__setattr__(self, "grid", tuple(float(v) for v in grid))

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "SweepSpec":
        quantities = data.get("quantities", data.get("quantity", ()))
        if isinstance(quantities, str):
            quantities = quantities.split(",")
        series = tuple(
            SeriesSpec(label=str(s["label"]), overrides=dict(s.get("overrides") or {}))
            for s in data.get("series") or [{"label": "default"}]
        )
        checks = tuple(
            ShapeCheck(
                quantity=c["quantity"],
                expect=c["expect"],
                series=tuple(c.get("series") or ()),
                other=c.get("other"),
                k=float(c.get("k", 3.0)),
                rtol=float(c.get("rtol", 0.0)),
            )
            for c in data.get("checks") or ()
        )
        ref = data.get("reference_point")
        return cls(
            variable=data["variable"],
            grid=tuple(data["grid"]),
            quantities=tuple(q.strip() for q in quantities),
            series=series,
            reference=data.get("reference", "d13"),
            checks=checks,
            reference_point=ReferencePoint(**ref) if ref else None,
            title=data.get("title", ""),
        )


def point_overrides(cfg: DictConfig, spec: SweepSpec, value: float) -> dict[str, Any]:
    """Dotted overrides that place ``cfg`` at one grid point."""
    if spec.variable == "alpha_sq_db":
        return {"power.alpha_sq_db": value}
    if spec.variable == "snr_l_db":
        return {"power.snr_l_db": value}
    if spec.variable == "snr_b_db":
        return {"power.snr_b1_db": value, "power.snr_b4_db": value, "power.noise4_db": None}
    if cfg.geometry.nodes is not None and cfg.geometry.nodes.btx is not None:
        raise ConfigValidationError("d12_ratio sweeps need geometry.nodes.btx unset")
    return {"geometry.d12": value * cfg.geometry[spec.reference]}


def _load_preset_file(figure_id: int) -> dict[str, Any]:
    path = pathlib.Path(config_path()) / "figure" / f"fig{figure_id}.yaml"
    with open(path, "r", encoding="utf-8") as f:
        return yaml.safe_load(f)


def figure_preset(
    figure_id: int | str, base: DictConfig | None = None
) -> tuple[DictConfig, SweepSpec]:
    """Scenario and sweep of one published figure (3 to 11)."""
    if isinstance(figure_id, str):
        figure_id = figure_id.lower().removeprefix("fig")
        if not figure_id.isdigit():
            raise ConfigValidationError(f"unknown figure preset '{figure_id}'")
        figure_id = int(figure_id)
    if figure_id not in FIGURE_IDS:
        raise ConfigValidationError(
            f"unknown figure preset {figure_id}; expected {FIGURE_IDS.start}..{FIGURE_IDS.stop - 1}"
        )
    data = _load_preset_file(figure_id)
    cfg = apply_overrides(base if base is not None else load_scenario_config(), data.get("scenario") or {})
    spec = SweepSpec.from_dict(data["sweep"])
    for series in spec.series:
        validate_config(apply_overrides(cfg, series.overrides))
    logger.debug(f"Loaded preset fig{figure_id}: {spec.title}")
    return cfg, spec


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str = ""


def _evaluate_one(
    check: ShapeCheck, rows: pd.DataFrame
) -> tuple[bool, str]:
    values = rows[check.quantity].to_numpy(dtype=np.float64)
    se = rows[f"{check.quantity}_se"].to_numpy(dtype=np.float64)
    if np.any(np.isnan(values)):
        return False, "undefined values"
    scale = 1e-12 * np.maximum(1.0, np.abs(values))

    if check.expect in ("decreasing", "increasing"):
        steps = np.diff(values)
        slack = check.k * np.hypot(se[1:], se[:-1]) + scale[1:]
        ok = np.all(steps <= slack) if check.expect == "decreasing" else np.all(steps >= -slack)
        return bool(ok), f"{steps.size} steps"
    if check.expect == "plateau":
        if values.size < 3:
            return False, "plateau needs at least 3 points"
        rise = values[1] - values[0]
        last = values[-1] - values[-2]
        rising = rise > check.k * np.hypot(se[0], se[1]) + scale[1]
        flat = abs(last) <= check.k * np.hypot(se[-1], se[-2]) + check.rtol * abs(values[-1]) + scale[-1]
        return bool(rising and flat), f"first step {rise:.3g}, last step {last:.3g}"
    if check.expect in ("interior_minimum", "interior_maximum"):
        minima, maxima = find_local_extrema(values)
        found = minima if check.expect == "interior_minimum" else maxima
        sign = -1.0 if check.expect == "interior_minimum" else 1.0
        # must clear both neighbours by k SE
        clear = [
            i
            for i in found
            if all(
                sign * (values[i] - values[j]) > check.k * np.hypot(se[i], se[j]) + scale[i]
                for j in (i - 1, i + 1)
            )
        ]
        return bool(clear), f"at indices {clear} of {found}"

    other = rows[check.other].to_numpy(dtype=np.float64)
    other_se = rows[f"{check.other}_se"].to_numpy(dtype=np.float64)
    slack = check.k * np.hypot(se, other_se) + scale
    gap = values - other
    ok = np.all(gap >= -slack) if check.expect == "above" else np.all(gap <= slack)
    return bool(ok), f"min gap {float(np.min(gap)):.3g}, max gap {float(np.max(gap)):.3g}"


def evaluate_checks(table: pd.DataFrame, spec: SweepSpec) -> list[CheckResult]:
    """Run every shape check of ``spec`` on a sweep table, series by series."""
    results = []
    for check in spec.checks:
        labels = check.series or tuple(s.label for s in spec.series)
        for label in labels:
            rows = table[table["series"] == label]
            name = f"{check.expect}({check.quantity}"
            name += f" vs {check.other})" if check.other else ")"
            name += f" [{label}]"
            if rows.empty:
                results.append(CheckResult(name, False, "series not in table"))
                continue
            passed, detail = _evaluate_one(check, rows)
            results.append(CheckResult(name, passed, detail))
    return results
