"""
Backscatter capacity bounds with the receiver co-located at the legacy transmitter.

After self-interference cancellation the receiver holds the scalar
sufficient statistic z1 = psi^H r1 = alpha ||psi||^2 b + CN(0, sigma_v1^2 ||psi||^2)
with psi(m) = Psi12(m) Psi21(m) s(m); every bound depends on the channel only
through Theta121 = ||psi||^2.
"""

import logging
from dataclasses import dataclass
from typing import Any, NamedTuple

import numpy as np
import numpy.typing as npt
from scipy.special import logsumexp

from .channel import draw_marginal_response, draw_taps, freq_response
from .frontend import Constellation
from .mc_engine import CapacityEstimate, TrialPlan, run_batched_estimate
from .numerics import ComplexArray, RealArray
from .scenario import MARGINAL, Scenario

logger = logging.getLogger(__name__)

_LN2 = np.log(2.0)
# mixture MI evaluates count x samples x Q x Q terms per block
_MIXTURE_BATCH = 128


@dataclass(frozen=True, eq=False)
class ColocatedRealization:
    psi: ComplexArray
    theta121: float
    snr_b1: float


def _draw_psi(
    scenario: Scenario, rng: np.random.Generator, count: int, sampling: str
) -> ComplexArray:
    """Stack of ``count`` vectors psi(m) = Psi12(m) Psi21(m) s(m)."""
    M = scenario.M
    s = draw_marginal_response(scenario.sigma_s_sq, rng, (count, M))
    if sampling == MARGINAL:
        psi12 = draw_marginal_response(scenario.variance("12"), rng, (count, M))
        psi21 = draw_marginal_response(scenario.variance("21"), rng, (count, M))
    else:
        responses = []
        for link in ("12", "21"):
            spec = scenario.links[link]
            responses.append(freq_response(draw_taps(spec, rng, size=count), spec.time_offset, M))
        psi12, psi21 = responses
    return psi12 * psi21 * s


def draw_colocated_realization(
    scenario: Scenario, rng: np.random.Generator, sampling: str | None = None
) -> ColocatedRealization:
    psi = _draw_psi(scenario, rng, 1, sampling or scenario.sampling)[0]
    return ColocatedRealization(
        psi=psi,
        theta121=float(np.sum(np.abs(psi) ** 2)),
        snr_b1=scenario.snr_b1,
    )


def _draw_theta121(scenario: Scenario, rng: np.random.Generator, count: int) -> RealArray:
    psi = _draw_psi(scenario, rng, count, scenario.sampling)
    return np.sum(np.abs(psi) ** 2, axis=1)


def _equiprobable(constellation: Constellation) -> npt.NDArray[np.float64]:
    return np.full(constellation.size, 1.0 / constellation.size)


def cutoff_rate_realization(
    constellation: Constellation,
    theta121: float | npt.ArrayLike,
    snr_b1: float,
    probabilities: npt.ArrayLike | None = None,
) -> float | RealArray:
    """
    -log2 sum_{q1,q2} p_q1 p_q2 exp(-Theta SNR |beta_q1 - beta_q2|^2 / (4 sigma_b^2)).

    Uses the constellation's own probabilities unless ``probabilities`` is
    given; broadcasts over ``theta121``.
    """
    p = constellation.probabilities if probabilities is None else np.asarray(probabilities)
    theta = np.asarray(theta121, dtype=np.float64)
    scale = snr_b1 / (4.0 * constellation.sigma_b_sq)
    exponents = -theta[..., None, None] * scale * constellation.squared_distances
    weights = np.outer(p, p)
    rate = -logsumexp(exponents, b=weights, axis=(-2, -1)) / _LN2
    rate = np.maximum(rate, 0.0)
    return float(rate) if rate.ndim == 0 else rate


def _reference_point_rate(
    constellation: Constellation, theta: RealArray, snr_b1: float
) -> RealArray:
    """Equiprobable cut-off rate of a distance-invariant set seen from point 0."""
    scale = snr_b1 / (4.0 * constellation.sigma_b_sq)
    d2 = constellation.squared_distances[0]
    exponents = -theta[..., None] * scale * d2
    Q = constellation.size
    return np.maximum(np.log2(Q) - logsumexp(exponents, axis=-1) / _LN2, 0.0)


def _min_distance_rate(
    constellation: Constellation, theta: RealArray | float, snr_b1: float
) -> RealArray:
    Q = constellation.size
    x = np.asarray(theta) * snr_b1 * constellation.delta_min**2 / (4.0 * constellation.sigma_b_sq)
    return np.maximum(np.log2(Q) - np.logaddexp(0.0, np.log(Q - 1) - x) / _LN2, 0.0)


def _lower_cutoff_rates(constellation: Constellation, theta: RealArray, snr_b1: float) -> RealArray:
    if constellation.is_distance_invariant:
        return _reference_point_rate(constellation, theta, snr_b1)
    return cutoff_rate_realization(
        constellation, theta, snr_b1, probabilities=_equiprobable(constellation)
    )


def c1_upper(scenario: Scenario, trials: int, seed: int, **plan_options: Any) -> CapacityEstimate:
    M = scenario.M

    def batch(rng: np.random.Generator, count: int) -> RealArray:
        theta = _draw_theta121(scenario, rng, count)
        return np.log2(1.0 + scenario.snr_b1 * theta) / M

    return run_batched_estimate(TrialPlan(trials, seed, **plan_options), batch)


def c1_upper_large_m(scenario: Scenario) -> float:
    """Upper bound with Theta121 replaced by its mean M sigma_s^2 sigma12^2 sigma21^2."""
    M = scenario.M
    g = scenario.geometry
    mean_theta = M * scenario.sigma_s_sq / (g.d12**2) ** g.eta
    return float(np.log2(1.0 + scenario.snr_b1 * mean_theta) / M)


def c1_lower_cutoff(
    scenario: Scenario, trials: int, seed: int, **plan_options: Any
) -> CapacityEstimate:
    """Cut-off-rate lower bound under equiprobable backscatter symbols."""
    M = scenario.M
    c = scenario.constellation

    def batch(rng: np.random.Generator, count: int) -> RealArray:
        theta = _draw_theta121(scenario, rng, count)
        return _lower_cutoff_rates(c, theta, scenario.snr_b1) / M

    return run_batched_estimate(TrialPlan(trials, seed, **plan_options), batch)


def c1_lower_min_distance(
    scenario: Scenario, trials: int, seed: int, **plan_options: Any
) -> CapacityEstimate:
    """Looser lower bound that keeps only the minimum distance."""
    M = scenario.M
    c = scenario.constellation

    def batch(rng: np.random.Generator, count: int) -> RealArray:
        theta = _draw_theta121(scenario, rng, count)
        return _min_distance_rate(c, theta, scenario.snr_b1) / M

    return run_batched_estimate(TrialPlan(trials, seed, **plan_options), batch)


class LowerBoundAsymptote(NamedTuple):
    cutoff: float
    min_distance: float


def c1_lower_large_m(scenario: Scenario) -> LowerBoundAsymptote:
    """Lower bounds with Theta121 -> M sigma_s^2 sigma12^4 plugged in."""
    M = scenario.M
    c = scenario.constellation
    theta = np.asarray(M * scenario.sigma_s_sq * scenario.variance("12") * scenario.variance("21"))
    return LowerBoundAsymptote(
        cutoff=float(_lower_cutoff_rates(c, theta, scenario.snr_b1)) / M,
        min_distance=float(_min_distance_rate(c, theta, scenario.snr_b1)) / M,
    )


def _mixture_information(
    constellation: Constellation,
    amplitude: RealArray,
    noise: ComplexArray,
    probabilities: npt.NDArray[np.float64],
) -> RealArray:
    """
    I(b; y) in bits for y = a beta_q + n, n ~ CN(0, 1), averaged over the
    supplied noise samples and exactly over q.

    ``amplitude`` has shape (B,), ``noise`` shape (B, S).
    """
    beta = constellation.points
    diff = beta[:, None] - beta[None, :]
    # arg[b, s, q, q'] = a (beta_q - beta_q') + n
    arg = amplitude[:, None, None, None] * diff[None, None, :, :] + noise[:, :, None, None]
    log_terms = -np.abs(arg) ** 2 + np.abs(noise)[:, :, None, None] ** 2
    log_mix = logsumexp(log_terms, b=probabilities[None, None, None, :], axis=-1)
    info = -(log_mix.mean(axis=1) @ probabilities) / _LN2
    return np.clip(info, 0.0, np.log2(constellation.size))


def mixture_mutual_information(
    constellation: Constellation,
    realization: ColocatedRealization,
    mc_samples: int,
    rng: np.random.Generator,
    probabilities: npt.ArrayLike | None = None,
) -> float:
    """
    Mutual information of the Gaussian-mixture channel seen by z1 for a fixed psi.

    Normalizing z1 by sigma_v1 ||psi|| leaves y = a beta_q + CN(0, 1) with
    a^2 = SNR_B1 Theta121 / sigma_b^2.
    """
    p = constellation.probabilities if probabilities is None else np.asarray(probabilities)
    a = np.sqrt(realization.snr_b1 * realization.theta121 / constellation.sigma_b_sq)
    noise = draw_marginal_response(1.0, rng, (1, mc_samples))
    return float(_mixture_information(constellation, np.array([a]), noise, p)[0])


def c1_mixture(
    scenario: Scenario,
    trials: int,
    seed: int,
    mc_samples: int | None = None,
    **plan_options: Any,
) -> CapacityEstimate:
    """(1/M) E[I(b; z1 | psi)] under equiprobable symbols."""
    M = scenario.M
    c = scenario.constellation
    samples = mc_samples or scenario.mixture_samples
    p = _equiprobable(c)
    plan_options.setdefault("batch_size", _MIXTURE_BATCH)

    def batch(rng: np.random.Generator, count: int) -> RealArray:
        theta = _draw_theta121(scenario, rng, count)
        a = np.sqrt(scenario.snr_b1 * theta / c.sigma_b_sq)
        noise = draw_marginal_response(1.0, rng, (count, samples))
        return _mixture_information(c, a, noise, p) / M

    return run_batched_estimate(TrialPlan(trials, seed, **plan_options), batch)
