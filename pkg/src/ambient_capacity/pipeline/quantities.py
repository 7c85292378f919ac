"""
Named estimators selectable from configs and the command line.

Every entry maps a ``Scenario`` (plus trial count, seed and plan options) to a
``CapacityEstimate``. Closed forms are wrapped as exact estimates.
"""

from collections.abc import Callable
from dataclasses import dataclass
from typing import Any

from .. import bs_colocated, bs_separated, legacy_capacity
from ..errors import ConfigValidationError
from ..mc_engine import CapacityEstimate
from ..scenario import Scenario

EstimatorFn = Callable[[Scenario, int, int, dict[str, Any]], CapacityEstimate]


@dataclass(frozen=True)
class Quantity:
    name: str
    fn: EstimatorFn
    monte_carlo: bool
    description: str

    def evaluate(
        self, scenario: Scenario, trials: int, seed: int, options: dict[str, Any]
    ) -> CapacityEstimate:
        return self.fn(scenario, trials, seed, options)


def _closed(fn: Callable[[Scenario], float]) -> EstimatorFn:
    def evaluate(scenario: Scenario, trials: int, seed: int, options: dict[str, Any]) -> CapacityEstimate:
        return CapacityEstimate.exact(fn(scenario))

    return evaluate


def _mc(fn: Callable[..., CapacityEstimate]) -> EstimatorFn:
    def evaluate(scenario: Scenario, trials: int, seed: int, options: dict[str, Any]) -> CapacityEstimate:
        return fn(scenario, trials, seed, **options)

    return evaluate


def _outage(scenario: Scenario, trials: int, seed: int, options: dict[str, Any]) -> CapacityEstimate:
    return legacy_capacity.outage_probability(scenario, scenario.rate_rs, trials, seed, **options)


def _outage_asleep(scenario: Scenario, trials: int, seed: int, options: dict[str, Any]) -> CapacityEstimate:
    return _outage(scenario.asleep(), trials, seed, options)


def _j_function(scenario: Scenario) -> float:
    g = scenario.geometry
    return bs_separated.j_function(g.d12, g.d14, g.theta, g.eta, scenario.alpha)


_REGISTRY: dict[str, Quantity] = {
    q.name: q
    for q in (
        Quantity(
            "c3_no_backscatter",
            _closed(lambda s: legacy_capacity.c3_no_backscatter(s.gamma13)),
            False,
            "legacy ergodic capacity with the tag asleep",
        ),
        Quantity("c3_semianalytic", _mc(legacy_capacity.c3_semianalytic), True, "legacy ergodic capacity"),
        Quantity("c3_mc_full", _mc(legacy_capacity.c3_mc_full), True, "legacy ergodic capacity, tap-level draws"),
        Quantity("delta_c3", _mc(legacy_capacity.delta_c3), True, "legacy capacity gain"),
        Quantity("delta_c3_low_snr", _closed(legacy_capacity.delta_c3_low_snr), False, "low-SNR capacity gain"),
        Quantity("delta_c3_high_snr", _closed(legacy_capacity.delta_c3_high_snr), False, "high-SNR capacity gain"),
        Quantity("outage", _outage, True, "legacy outage probability at rate.rs"),
        Quantity("outage_no_backscatter", _outage_asleep, True, "legacy outage with the tag asleep"),
        Quantity("c1_upper", _mc(bs_colocated.c1_upper), True, "co-located upper bound"),
        Quantity("c1_upper_large_m", _closed(bs_colocated.c1_upper_large_m), False, "co-located upper bound, large M"),
        Quantity("c1_lower_cutoff", _mc(bs_colocated.c1_lower_cutoff), True, "co-located cut-off lower bound"),
        Quantity(
            "c1_lower_min_distance",
            _mc(bs_colocated.c1_lower_min_distance),
            True,
            "co-located minimum-distance lower bound",
        ),
        Quantity(
            "c1_lower_large_m",
            _closed(lambda s: bs_colocated.c1_lower_large_m(s).cutoff),
            False,
            "co-located cut-off lower bound, large M",
        ),
        Quantity("c1_mixture", _mc(bs_colocated.c1_mixture), True, "co-located mixture mutual information"),
        Quantity("c4_upper", _mc(bs_separated.c4_upper), True, "separated upper bound"),
        Quantity("c4_upper_large_m", _closed(bs_separated.c4_upper_large_m), False, "separated upper bound, large M"),
        Quantity("c4_lower", _mc(bs_separated.c4_lower), True, "separated cut-off lower bound"),
        Quantity(
            "bpsk_lower_closed_form",
            _closed(bs_separated.bpsk_lower_closed_form),
            False,
            "separated BPSK lower bound through J",
        ),
        Quantity("j_function", _closed(_j_function), False, "BPSK cross/common mean-square ratio"),
        Quantity("j_ratio_mc", _mc(bs_separated.j_ratio_mc), True, "zero-noise Monte-Carlo of J"),
    )
}


def available_quantities() -> list[str]:
    return sorted(_REGISTRY)


def get_quantity(name: str) -> Quantity:
    try:
        return _REGISTRY[name]
    except KeyError:
        raise ConfigValidationError(
            f"unknown quantity '{name}'; choose from {', '.join(available_quantities())}"
        ) from None


def parse_quantities(names: str | list[str] | tuple[str, ...]) -> list[Quantity]:
    """Accepts ``"a,b"`` or a sequence of names; order is kept, duplicates dropped."""
    if isinstance(names, str):
        names = names.split(",")
    seen: dict[str, Quantity] = {}
    for raw in names:
        name = raw.strip()
        if name and name not in seen:
            seen[name] = get_quantity(name)
    if not seen:
        raise ConfigValidationError("no quantity selected")
    return list(seen.values())
