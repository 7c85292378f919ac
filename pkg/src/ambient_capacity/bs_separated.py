"""
Backscatter capacity bounds for a backscatter receiver at its own node.

The receiver knows the channel responses and the CFO but not the legacy
data, so given b = beta_q the counter-rotated block is zero-mean Gaussian
with per-subcarrier variances

    Lambda_q(m) = sigma_s^2 |alpha Psi12(m) Psi24(m) beta_q + Psi14(m)|^2 + sigma_v4^2.

For BPSK the two variances split into a common part and a cross part
+-2 alpha sigma_s^2 Re{Psi12 Psi24 Psi14^*}; the cut-off rate depends only on
their ratio cross/common.
"""

import logging
from dataclasses import dataclass
from typing import Any

import numpy as np
import numpy.typing as npt
from scipy.optimize import minimize_scalar
from scipy.special import logsumexp

from .channel import carnot_distance, draw_marginal_response, draw_taps, freq_response
from .errors import ConsistencyError, DomainError
from .frontend import Constellation
from .mc_engine import (
    CapacityEstimate,
    TrialPlan,
    collect_batched,
    ratio_estimate,
    run_batched_estimate,
)
from .numerics import ComplexArray, RealArray
from .scenario import MARGINAL, Scenario

logger = logging.getLogger(__name__)

_LN2 = np.log(2.0)
J_MAX = 1.0 / (1.0 + 2.0 * np.sqrt(2.0))


@dataclass(frozen=True, eq=False)
class SeparatedRealization:
    """Channel responses and legacy block of one coherence interval; may be stacked."""

    psi12: ComplexArray
    psi24: ComplexArray
    psi14: ComplexArray
    s: ComplexArray
    snr_b4: float

    def __post_init__(self) -> None:
        if not (self.psi12.shape == self.psi24.shape == self.psi14.shape == self.s.shape):
            raise DomainError("realization vectors differ in shape")

    @property
    def theta124(self) -> float | RealArray:
        value = np.sum(np.abs(self.s) ** 2 * np.abs(self.psi12 * self.psi24) ** 2, axis=-1)
        return float(value) if np.ndim(value) == 0 else value


@dataclass(frozen=True, eq=False)
class LambdaSpectrum:
    """Lambda_q(m) with shape (..., Q, M)."""

    values: RealArray

    def __post_init__(self) -> None:
        if np.any(~(self.values > 0.0)):
            raise ConsistencyError("Lambda_q(m) must be strictly positive")

    @property
    def Q(self) -> int:
        return int(self.values.shape[-2])

    @property
    def M(self) -> int:
        return int(self.values.shape[-1])


def _draw_separated(
    scenario: Scenario, rng: np.random.Generator, count: int, sampling: str
) -> SeparatedRealization:
    M = scenario.M
    s = draw_marginal_response(scenario.sigma_s_sq, rng, (count, M))
    psi = {}
    for link in ("12", "24", "14"):
        if sampling == MARGINAL:
            psi[link] = draw_marginal_response(scenario.variance(link), rng, (count, M))
        else:
            spec = scenario.links[link]
            psi[link] = freq_response(draw_taps(spec, rng, size=count), spec.time_offset, M)
    return SeparatedRealization(
        psi12=psi["12"], psi24=psi["24"], psi14=psi["14"], s=s, snr_b4=scenario.snr_b4
    )


def draw_separated_realization(
    scenario: Scenario, rng: np.random.Generator, sampling: str | None = None
) -> SeparatedRealization:
    stacked = _draw_separated(scenario, rng, 1, sampling or scenario.sampling)
    return SeparatedRealization(
        psi12=stacked.psi12[0],
        psi24=stacked.psi24[0],
        psi14=stacked.psi14[0],
        s=stacked.s[0],
        snr_b4=stacked.snr_b4,
    )


def lambda_spectrum(
    realization: SeparatedRealization,
    constellation: Constellation,
    sigma_s_sq: float,
    sigma_v4_sq: float,
    alpha: float,
) -> LambdaSpectrum:
    """Per-symbol, per-subcarrier variances, checked against the completed square."""
    beta = constellation.points[:, None]
    cascade = (realization.psi12 * realization.psi24)[..., None, :]
    direct = realization.psi14[..., None, :]

    expanded = (
        alpha**2 * sigma_s_sq * np.abs(cascade) ** 2 * np.abs(beta) ** 2
        + 2.0 * alpha * sigma_s_sq * np.real(cascade * np.conj(direct) * beta)
        + sigma_s_sq * np.abs(direct) ** 2
        + sigma_v4_sq
    )
    completed = sigma_s_sq * np.abs(alpha * cascade * beta + direct) ** 2 + sigma_v4_sq

    scale = (
        alpha**2 * sigma_s_sq * np.abs(cascade) ** 2 * np.abs(beta) ** 2
        + sigma_s_sq * np.abs(direct) ** 2
        + sigma_v4_sq
    )
    if np.any(np.abs(expanded - completed) > 1e-10 * scale):
        raise ConsistencyError("Lambda expansion disagrees with its completed square")
    return LambdaSpectrum(completed)


def cutoff_rate_realization_sep(
    lam: LambdaSpectrum | npt.ArrayLike, Q: int | None = None
) -> float | RealArray:
    """
    Equiprobable cut-off rate of the partially-coherent channel, in bits per block.

    The Bhattacharyya products over m are accumulated as sums of logs.
    """
    values = lam.values if isinstance(lam, LambdaSpectrum) else np.asarray(lam, dtype=np.float64)
    Q = values.shape[-2] if Q is None else Q
    if values.shape[-2] != Q:
        raise DomainError(f"expected {Q} symbol rows, got {values.shape[-2]}")
    M = values.shape[-1]

    logs = np.log(values)
    l1 = values[..., :, None, :]
    l2 = values[..., None, :, :]
    per_pair = np.sum(
        0.5 * (logs[..., :, None, :] + logs[..., None, :, :]) - np.log(l1 + l2), axis=-1
    )
    off_diagonal = ~np.eye(Q, dtype=bool)
    pair_logs = per_pair[..., off_diagonal] + M * _LN2 - np.log(Q)
    total = logsumexp(pair_logs, axis=-1)
    rate = np.maximum(np.log2(Q) - np.logaddexp(0.0, total) / _LN2, 0.0)
    return float(rate) if np.ndim(rate) == 0 else rate


def c4_lower(scenario: Scenario, trials: int, seed: int, **plan_options: Any) -> CapacityEstimate:
    M = scenario.M
    c = scenario.constellation

    def batch(rng: np.random.Generator, count: int) -> RealArray:
        realization = _draw_separated(scenario, rng, count, scenario.sampling)
        lam = lambda_spectrum(
            realization, c, scenario.sigma_s_sq, scenario.sigma_v4_sq, scenario.alpha
        )
        return cutoff_rate_realization_sep(lam, c.size) / M

    return run_batched_estimate(TrialPlan(trials, seed, **plan_options), batch)


def c4_upper(scenario: Scenario, trials: int, seed: int, **plan_options: Any) -> CapacityEstimate:
    """Bound with the legacy data additionally known at the receiver."""
    M = scenario.M

    def batch(rng: np.random.Generator, count: int) -> RealArray:
        realization = _draw_separated(scenario, rng, count, scenario.sampling)
        return np.log2(1.0 + scenario.snr_b4 * realization.theta124) / M

    return run_batched_estimate(TrialPlan(trials, seed, **plan_options), batch)


def c4_upper_large_m(scenario: Scenario) -> float:
    """Upper bound with Theta124 replaced by its mean M sigma_s^2 sigma12^2 sigma24^2."""
    M = scenario.M
    mean_theta = M * scenario.sigma_s_sq * scenario.variance("12") * scenario.variance("24")
    return float(np.log2(1.0 + scenario.snr_b4 * mean_theta) / M)


def bpsk_lambda_parts(
    realization: SeparatedRealization, sigma_s_sq: float, sigma_v4_sq: float, alpha: float
) -> tuple[RealArray, RealArray]:
    """(Lambda_common, Lambda_cross) so that Lambda_{+-1} = common +- cross."""
    cascade = realization.psi12 * realization.psi24
    direct = realization.psi14
    common = (
        alpha**2 * sigma_s_sq * np.abs(cascade) ** 2
        + sigma_s_sq * np.abs(direct) ** 2
        + sigma_v4_sq
    )
    cross = 2.0 * alpha * sigma_s_sq * np.real(cascade * np.conj(direct))
    return common, cross


def bpsk_product_factor(lambda_common: npt.ArrayLike, lambda_cross: npt.ArrayLike) -> float | RealArray:
    """prod_m sqrt(1 - (cross/common)^2), reduced over the last axis."""
    common = np.asarray(lambda_common, dtype=np.float64)
    cross = np.asarray(lambda_cross, dtype=np.float64)
    if np.any(common <= 0.0) or np.any(np.abs(cross) > common * (1.0 + 1e-12)):
        raise ConsistencyError("BPSK variances need |Lambda_cross| <= Lambda_common")
    ratio = np.clip(cross / common, -1.0, 1.0)
    with np.errstate(divide="ignore"):
        log_product = 0.5 * np.sum(np.log1p(-(ratio**2)), axis=-1)
    product = np.exp(log_product)
    return float(product) if np.ndim(product) == 0 else product


def bpsk_cutoff_rate(lambda_common: npt.ArrayLike, lambda_cross: npt.ArrayLike) -> float | RealArray:
    return 1.0 - np.log2(1.0 + bpsk_product_factor(lambda_common, lambda_cross))


def _d_ratio(d12: float, d14: float, theta: float, eta: float, alpha: float) -> float:
    d24 = carnot_distance(d12, d14, theta)
    return (d12 * d24 / d14) ** eta / alpha**2


def j_function(d12: float, d14: float, theta: float, eta: float, alpha: float) -> float:
    """1 / (1 + 2/D + D) with D = (d12 d24 / d14)^eta / alpha^2."""
    if not (d12 > 0 and d14 > 0 and eta > 0):
        raise DomainError("j_function needs positive distances and exponent")
    if alpha == 0.0:
        return 0.0
    D = _d_ratio(d12, d14, theta, eta, alpha)
    return float(1.0 / (1.0 + 2.0 / D + D))


def j_maximizer(
    d14: float,
    theta: float,
    eta: float,
    alpha: float,
    d12_max: float = 2.0,
    grid_points: int = 2001,
) -> float:
    """Golden-section maximizer of J over d12 in (0, d12_max], seeded by a coarse grid."""
    grid = np.linspace(d12_max / grid_points, d12_max, grid_points)
    values = np.array([j_function(d, d14, theta, eta, alpha) for d in grid])
    i = int(np.clip(np.argmax(values), 1, grid_points - 2))
    result = minimize_scalar(
        lambda d: -j_function(d, d14, theta, eta, alpha),
        bracket=(grid[i - 1], grid[i], grid[i + 1]),
        method="golden",
        options={"xtol": 1e-12},
    )
    logger.debug("J maximizer: d12*=%.10f after %d evaluations", result.x, result.nfev)
    return float(result.x)


def bpsk_lower_from_j(j: float, M: int) -> float:
    return float((1.0 - np.log2(1.0 + (1.0 - j) ** (M / 2.0))) / M)


def bpsk_lower_closed_form(scenario: Scenario) -> float:
    """Low-noise BPSK lower bound through J(d12)."""
    c = scenario.constellation
    if c.size != 2 or not c.is_constant_modulus:
        raise DomainError("closed-form lower bound is defined for BPSK only")
    g = scenario.geometry
    j = j_function(g.d12, g.d14, g.theta, g.eta, scenario.alpha)
    return bpsk_lower_from_j(j, scenario.M)


def j_ratio_mc(scenario: Scenario, trials: int, seed: int, **plan_options: Any) -> CapacityEstimate:
    """
    Zero-noise Monte-Carlo of E[Lambda_cross^2] / E[Lambda_common^2] for BPSK,
    one subcarrier per trial.
    """
    alpha = scenario.alpha
    s2 = scenario.sigma_s_sq

    def batch(rng: np.random.Generator, count: int) -> RealArray:
        cascade = draw_marginal_response(scenario.variance("12"), rng, count) * draw_marginal_response(
            scenario.variance("24"), rng, count
        )
        direct = draw_marginal_response(scenario.variance("14"), rng, count)
        common = alpha**2 * s2 * np.abs(cascade) ** 2 + s2 * np.abs(direct) ** 2
        cross = 2.0 * alpha * s2 * np.real(cascade * np.conj(direct))
        return np.column_stack([cross**2, common**2])

    samples = collect_batched(TrialPlan(trials, seed, **plan_options), batch)
    return ratio_estimate(samples[:, 0], samples[:, 1])
