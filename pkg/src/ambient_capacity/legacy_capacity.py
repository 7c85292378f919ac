"""
Ergodic capacity, capacity gain and outage of the legacy link.

The backscattered path turns the legacy channel into
Psi3(m) = Psi13(m) + alpha b Psi12(m) Psi23(m). Conditioned on (b, Psi12(m))
the gain |Psi3(m)|^2 is exponential, so the default estimator integrates
it in closed form with ``exi`` and only samples (b, Psi12).
"""

import logging
from collections.abc import Mapping
from dataclasses import dataclass
from typing import Any, Literal

import numpy as np
import numpy.typing as npt

from .channel import carnot_distance, composite_legacy_response, draw_taps, freq_response
from .errors import DomainError
from .mc_engine import (
    CapacityEstimate,
    TrialPlan,
    collect_batched,
    run_batched_estimate,
)
from .numerics import LOG2E, ComplexArray, exi
from .scenario import Scenario

logger = logging.getLogger(__name__)

Regime = Literal["low", "high"]


@dataclass(frozen=True)
class LegacySnr:
    snr_l: float
    gamma13: float

    def __post_init__(self) -> None:
        if not (self.snr_l > 0 and self.gamma13 > 0):
            raise DomainError("legacy SNRs must be > 0")

    @classmethod
    def from_scenario(cls, scenario: Scenario) -> "LegacySnr":
        return cls(snr_l=scenario.snr_l, gamma13=scenario.gamma13)


def c3_no_backscatter(gamma13: float) -> float:
    """Ergodic capacity of the Rayleigh legacy link with the tag asleep."""
    if gamma13 < 0:
        raise DomainError(f"gamma13 must be >= 0, got {gamma13}")
    return float(exi(gamma13)) * LOG2E


def upsilon3(
    gamma13: float,
    alpha: float,
    sigma23_sq: float,
    sigma13_sq: float,
    b: complex | npt.ArrayLike,
    psi12_m: complex | npt.ArrayLike,
) -> float | npt.NDArray[np.float64]:
    """Conditional mean SNR of subcarrier m given (b, Psi12(m)); broadcasts."""
    gain = alpha**2 * (sigma23_sq / sigma13_sq) * np.abs(b) ** 2 * np.abs(psi12_m) ** 2
    out = gamma13 * (1.0 + gain)
    return float(out) if np.ndim(out) == 0 else out


def _draw_symbols(scenario: Scenario, rng: np.random.Generator, count: int) -> ComplexArray:
    c = scenario.constellation
    return rng.choice(c.points, size=count, p=c.probabilities)


def c3_semianalytic(
    scenario: Scenario, trials: int, seed: int, **plan_options: Any
) -> CapacityEstimate:
    """Monte-Carlo over (b, Psi12(m)) with the Rayleigh 1->3 gain integrated out."""
    gamma13 = scenario.gamma13
    if scenario.alpha == 0.0:
        return CapacityEstimate.exact(c3_no_backscatter(gamma13), trials)

    M = scenario.M
    sigma12_sq = scenario.variance("12")
    sigma23_sq = scenario.variance("23")
    sigma13_sq = scenario.variance("13")

    def batch(rng: np.random.Generator, count: int) -> npt.NDArray[np.float64]:
        b = _draw_symbols(scenario, rng, count)
        # |Psi12(m)|^2 ~ Exp(sigma12^2) exactly, subcarrier by subcarrier
        gain12 = rng.exponential(sigma12_sq, size=(count, M))
        ups = upsilon3(
            gamma13, scenario.alpha, sigma23_sq, sigma13_sq, b[:, None], np.sqrt(gain12)
        )
        return exi(ups).mean(axis=1) * LOG2E

    return run_batched_estimate(TrialPlan(trials, seed, **plan_options), batch)


def _per_frame_rates(
    scenario: Scenario,
    rng: np.random.Generator,
    count: int,
    fixed_taps: Mapping[str, npt.ArrayLike] | None,
) -> npt.NDArray[np.float64]:
    """(1/M) sum_m log2(1 + SNR_L |Psi3(m)|^2) for ``count`` tap-level draws."""
    fixed = fixed_taps or {}
    M = scenario.M
    psi = {}
    for link in ("13", "12", "23"):
        spec = scenario.links[link]
        taps = (
            np.broadcast_to(np.asarray(fixed[link], dtype=np.complex128), (count, spec.order + 1))
            if link in fixed
            else draw_taps(spec, rng, size=count)
        )
        psi[link] = freq_response(taps, spec.time_offset, M)
    b = _draw_symbols(scenario, rng, count)
    psi3 = composite_legacy_response(psi["13"], psi["12"], psi["23"], scenario.alpha, b)
    return np.log2(1.0 + scenario.snr_l * np.abs(psi3) ** 2).mean(axis=1)


def c3_mc_full(
    scenario: Scenario,
    trials: int,
    seed: int,
    fixed_taps: Mapping[str, npt.ArrayLike] | None = None,
    **plan_options: Any,
) -> CapacityEstimate:
    """
    Brute-force ergodic capacity from full tap draws.

    ``fixed_taps`` pins the taps of some links (13, 12, 23) instead of drawing them.
    """

    def batch(rng: np.random.Generator, count: int) -> npt.NDArray[np.float64]:
        return _per_frame_rates(scenario, rng, count, fixed_taps)

    return run_batched_estimate(TrialPlan(trials, seed, **plan_options), batch)


def delta_c3(scenario: Scenario, trials: int, seed: int, **plan_options: Any) -> CapacityEstimate:
    """Capacity gain over the sleep-mode closed form (semi-analytic estimator)."""
    estimate = c3_semianalytic(scenario, trials, seed, **plan_options)
    return estimate.minus(c3_no_backscatter(scenario.gamma13))


def _low_snr_gain(scenario: Scenario, d12: float, d23: float) -> float:
    g = scenario.geometry
    return (
        scenario.alpha**2
        * scenario.sigma_b_sq
        * scenario.snr_l
        * (d12 * d23) ** (-g.eta)
        * LOG2E
    )


def _high_snr_gain(scenario: Scenario, d12: float, d23: float, published_conventions: bool) -> float:
    """
    exi(Omega) log2(e) per hop pair. Strict mode reads the displayed log²e as
    (log2 e)², giving exi(Omega) (log2 e)²; it is not ln2 log2(e) = 1.
    """
    if not scenario.constellation.is_constant_modulus:
        raise DomainError("high-SNR capacity gain needs a constant-modulus constellation")
    g = scenario.geometry
    omega = scenario.alpha**2 * (g.d13 / (d12 * d23)) ** g.eta
    value = float(exi(omega)) * LOG2E
    return value * LOG2E if published_conventions else value


def omega3(scenario: Scenario) -> float:
    g = scenario.geometry
    return scenario.alpha**2 * (g.d13 / (g.d12 * g.d23)) ** g.eta


def delta_c3_low_snr(scenario: Scenario) -> float:
    g = scenario.geometry
    return _low_snr_gain(scenario, g.d12, g.d23)


def delta_c3_high_snr(scenario: Scenario, published_conventions: bool | None = None) -> float:
    """
    exi(Omega3) log2(e); ``published_conventions`` applies the extra log2(e) factor
    of the displayed high-SNR expression. Defaults to ``scenario.published_conventions``.
    """
    strict = scenario.published_conventions if published_conventions is None else published_conventions
    g = scenario.geometry
    return _high_snr_gain(scenario, g.d12, g.d23, strict)


def outage_probability(
    scenario: Scenario, rate_rs: float, trials: int, seed: int, **plan_options: Any
) -> CapacityEstimate:
    """Probability that one frame's mutual information falls below ``rate_rs``."""
    if rate_rs < 0:
        raise DomainError(f"target rate must be >= 0, got {rate_rs}")

    def batch(rng: np.random.Generator, count: int) -> npt.NDArray[np.float64]:
        return _per_frame_rates(scenario, rng, count, None)

    rates = collect_batched(TrialPlan(trials, seed, **plan_options), batch)
    return CapacityEstimate.from_proportion(rates < rate_rs)


def find_local_extrema(values: npt.ArrayLike) -> tuple[list[int], list[int]]:
    """Indices of strict interior local minima and maxima."""
    v = np.asarray(values, dtype=np.float64)
    inner = np.arange(1, v.size - 1)
    minima = inner[(v[1:-1] < v[:-2]) & (v[1:-1] < v[2:])]
    maxima = inner[(v[1:-1] > v[:-2]) & (v[1:-1] > v[2:])]
    return minima.tolist(), maxima.tolist()


@dataclass(frozen=True, eq=False)
class DistanceCurve:
    d12: npt.NDArray[np.float64]
    values: npt.NDArray[np.float64]
    regime: str
    argmin: int
    argmax: int
    local_minima: tuple[float, ...]
    local_maxima: tuple[float, ...]

    @property
    def is_decreasing(self) -> bool:
        return bool(np.all(np.diff(self.values) < 0.0))

    @property
    def is_increasing(self) -> bool:
        return bool(np.all(np.diff(self.values) > 0.0))


def delta_c3_vs_distance(
    scenario: Scenario, d12_grid: npt.ArrayLike, regime: Regime = "high"
) -> DistanceCurve:
    """Asymptotic capacity gain along d12 with d23 from Carnot's law."""
    grid = np.asarray(d12_grid, dtype=np.float64)
    if grid.size == 0 or np.any(grid <= 0.0):
        raise DomainError("distance grid must be nonempty and within (0, inf)")
    g = scenario.geometry
    values = np.empty_like(grid)
    for i, d12 in enumerate(grid):
        d23 = carnot_distance(d12, g.d13, g.phi)
        if regime == "low":
            values[i] = _low_snr_gain(scenario, d12, d23)
        else:
            values[i] = _high_snr_gain(scenario, d12, d23, scenario.published_conventions)
    minima, maxima = find_local_extrema(values)
    return DistanceCurve(
        d12=grid,
        values=values,
        regime=regime,
        argmin=int(np.argmin(values)),
        argmax=int(np.argmax(values)),
        local_minima=tuple(float(grid[i]) for i in minima),
        local_maxima=tuple(float(grid[i]) for i in maxima),
    )
