"""
Scenario and sweep orchestration.

Chains configuration resolution, estimator evaluation and table assembly.
Every grid point reuses the master seed, so curves share their random
numbers and neighboring points differ only through the swept parameter.
"""

import logging
import math
import time
from dataclasses import dataclass, field
from typing import Any

import pandas as pd
from omegaconf import DictConfig

from ..cache import EstimateCache, estimate_key
from ..config import apply_overrides, config_hash, plan_options, to_scenario, validate_config
from ..errors import DomainError
from ..mc_engine import CapacityEstimate
from ..scenario import Scenario
from .quantities import Quantity, parse_quantities
from .sweep import CheckResult, SweepSpec, evaluate_checks, point_overrides

logger = logging.getLogger(__name__)

SCENARIO_COLUMNS = ["quantity", "mean", "std_error", "trials", "runtime_s"]


@dataclass
class RunResult:
    table: pd.DataFrame
    metadata: dict[str, Any] = field(default_factory=dict)
    checks: list[CheckResult] = field(default_factory=list)

    @property
    def all_checks_passed(self) -> bool:
        return all(c.passed for c in self.checks)


class ScenarioRunner:
    """Evaluates named quantities at one operating point."""

    def __init__(self, cache: EstimateCache | None = None) -> None:
        self.cache = cache

    def estimate(
        self, cfg: DictConfig, scenario: Scenario, quantity: Quantity
    ) -> tuple[CapacityEstimate | None, float]:
        """(estimate or None when undefined here, runtime in seconds)."""
        trials, seed = cfg.mc.trials, cfg.mc.seed
        cached = self.cache is not None and quantity.monte_carlo
        key = estimate_key(quantity.name, config_hash(cfg), trials, seed) if cached else ""
        if cached and self.cache.has(key):
            logger.debug(f"Cache hit: {key}")
            return self.cache.get(key), 0.0

        start = time.perf_counter()
        try:
            estimate = quantity.evaluate(scenario, trials, seed, plan_options(cfg))
        except DomainError as e:
            logger.warning(f"{quantity.name} is undefined here: {e}")
            return None, time.perf_counter() - start
        runtime = time.perf_counter() - start

        if cached:
            self.cache.set(key, estimate)
        return estimate, runtime

    def run_scenario(
        self, cfg: DictConfig, quantities: str | list[str] | None = None
    ) -> RunResult:
        """One row per quantity with mean, standard error, trials and runtime."""
        selected = parse_quantities(quantities if quantities is not None else list(cfg.quantities))
        validate_config(cfg)
        scenario = to_scenario(cfg)

        rows = []
        for quantity in selected:
            logger.info(f"Evaluating {quantity.name} ({quantity.description})")
            estimate, runtime = self.estimate(cfg, scenario, quantity)
            rows.append(_scenario_row(quantity, estimate, runtime))
            if estimate is not None:
                logger.info(f"  {quantity.name} = {estimate}")

        table = pd.DataFrame(rows, columns=SCENARIO_COLUMNS)
        metadata = {
            "config_hash": config_hash(cfg),
            "seed": cfg.mc.seed,
            "trials": cfg.mc.trials,
            "published_conventions": cfg.options.published_conventions,
        }
        return RunResult(table=table, metadata=metadata)


def _scenario_row(
    quantity: Quantity, estimate: CapacityEstimate | None, runtime: float
) -> dict[str, Any]:
    if estimate is None:
        return {
            "quantity": quantity.name,
            "mean": math.nan,
            "std_error": math.nan,
            "trials": 0,
            "runtime_s": runtime,
        }
    return {
        "quantity": quantity.name,
        "mean": estimate.mean,
        "std_error": estimate.std_error,
        "trials": estimate.trials if quantity.monte_carlo else 0,
        "runtime_s": runtime,
    }


class SweepRunner:
    """Runs a sweep over one variable for every series of a ``SweepSpec``."""

    def __init__(self, cache: EstimateCache | None = None) -> None:
        self.scenario_runner = ScenarioRunner(cache)

    def run_sweep(self, cfg: DictConfig, spec: SweepSpec, preset: str | None = None) -> RunResult:
        logger.info("=" * 60)
        logger.info(f"Sweep over {spec.variable}: {len(spec.grid)} points x {len(spec.series)} series")
        if spec.title:
            logger.info(spec.title)
        logger.info("=" * 60)

        quantities = parse_quantities(list(spec.quantities))
        rows = []
        for series in spec.series:
            logger.info(f"📈 Series: {series.label}")
            series_cfg = apply_overrides(cfg, series.overrides)
            for value in spec.grid:
                point_cfg = apply_overrides(series_cfg, point_overrides(series_cfg, spec, value))
                validate_config(point_cfg)
                scenario = to_scenario(point_cfg)
                row: dict[str, Any] = {"series": series.label, spec.variable: value}
                runtime = 0.0
                for quantity in quantities:
                    estimate, elapsed = self.scenario_runner.estimate(point_cfg, scenario, quantity)
                    runtime += elapsed
                    row[quantity.name] = math.nan if estimate is None else estimate.mean
                    row[f"{quantity.name}_se"] = math.nan if estimate is None else estimate.std_error
                row["trials"] = point_cfg.mc.trials
                row["runtime_s"] = runtime
                rows.append(row)
                logger.debug(f"  {spec.variable}={value:g} done in {runtime:.2f}s")

        table = pd.DataFrame(rows)
        checks = evaluate_checks(table, spec)
        for check in checks:
            status = "pass" if check.passed else "FAIL"
            log = logger.info if check.passed else logger.warning
            log(f"Check {check.name}: {status} ({check.detail})")

        metadata: dict[str, Any] = {
            "config_hash": config_hash(cfg),
            "seed": cfg.mc.seed,
            "trials": cfg.mc.trials,
            "variable": spec.variable,
        }
        if preset is not None:
            metadata["preset"] = preset
        if spec.reference_point is not None:
            metadata["reference"] = _reference_summary(table, spec)
        for i, check in enumerate(checks):
            metadata[f"check_{i}"] = f"{check.name}: {'pass' if check.passed else 'fail'}"
        return RunResult(table=table, metadata=metadata, checks=checks)


def _reference_summary(table: pd.DataFrame, spec: SweepSpec) -> str:
    ref = spec.reference_point
    assert ref is not None
    match = table[(table["series"] == ref.series) & (table[spec.variable] == ref.at)]
    computed = "not on grid"
    if not match.empty and ref.quantity in match:
        row = match.iloc[0]
        computed = f"{row[ref.quantity]:.6g} ± {row[f'{ref.quantity}_se']:.2g}"
    return (
        f"{ref.quantity} at {spec.variable}={ref.at:g} [{ref.series}]: "
        f"published {ref.value:g}, computed {computed}"
    )
