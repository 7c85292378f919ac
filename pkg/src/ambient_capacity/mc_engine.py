"""
Reproducible Monte-Carlo trial runner.

Every trial (or every block of ``batch_size`` trials in the vectorized mode)
draws from its own stream derived from ``(master_seed, index)``, and partial
results are reassembled in index order. Estimates therefore do not depend on
worker count or completion order.
"""

import logging
import math
from collections.abc import Callable
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import asdict, dataclass
from typing import Any

import numpy as np
import numpy.typing as npt
from tqdm import tqdm

from .errors import DomainError

logger = logging.getLogger(__name__)

# spawn-key prefixes keep per-trial and per-block streams disjoint
_TRIAL_KEY = 0
_BLOCK_KEY = 1

TrialFn = Callable[[np.random.Generator], float]
BatchFn = Callable[[np.random.Generator, int], npt.NDArray[Any]]


@dataclass(frozen=True)
class TrialPlan:
    trials: int
    master_seed: int = 0
    batch_size: int = 4096
    max_workers: int = 1
    show_progress: bool = False

    def __post_init__(self) -> None:
        if self.trials < 1:
            raise DomainError(f"trials must be >= 1, got {self.trials}")
        if self.batch_size < 1 or self.max_workers < 1:
            raise DomainError("batch_size and max_workers must be >= 1")
        if not 0 <= self.master_seed < 2**64:
            raise DomainError("master_seed must be a 64-bit unsigned integer")

    @property
    def blocks(self) -> int:
        return math.ceil(self.trials / self.batch_size)

    def block_bounds(self, block: int) -> tuple[int, int]:
        start = block * self.batch_size
        return start, min(self.batch_size, self.trials - start)


@dataclass(frozen=True)
class CapacityEstimate:
    """Monte-Carlo mean (b/s/Hz unless stated otherwise) with its standard error."""

    mean: float
    std_error: float
    trials: int

    def __post_init__(self) -> None:
        if self.trials < 1:
            raise DomainError("an estimate needs at least one trial")
        if not self.std_error >= 0.0:
            raise DomainError("standard error must be >= 0")

    @classmethod
    def exact(cls, value: float, trials: int = 1) -> "CapacityEstimate":
        return cls(float(value), 0.0, trials)

    @classmethod
    def from_samples(cls, values: npt.ArrayLike) -> "CapacityEstimate":
        values = np.asarray(values, dtype=np.float64).ravel()
        n = values.size
        if n == 0:
            raise DomainError("no samples")
        if n == 1 or np.all(values == values[0]):
            return cls(float(values[0]), 0.0, n)
        return cls(float(values.mean()), float(values.std(ddof=1) / math.sqrt(n)), n)

    @classmethod
    def from_proportion(cls, hits: npt.ArrayLike) -> "CapacityEstimate":
        """Fraction of true entries with the binomial standard error."""
        hits = np.asarray(hits, dtype=bool).ravel()
        n = hits.size
        p = float(hits.mean())
        return cls(p, math.sqrt(p * (1.0 - p) / n), n)

    def combined_se(self, other: "CapacityEstimate") -> float:
        return math.hypot(self.std_error, other.std_error)

    def agrees_with(self, other: "CapacityEstimate", k: float = 3.0) -> bool:
        slack = k * self.combined_se(other) + 1e-12 * max(1.0, abs(self.mean))
        return abs(self.mean - other.mean) <= slack

    def minus(self, other: "CapacityEstimate | float") -> "CapacityEstimate":
        if isinstance(other, CapacityEstimate):
            return CapacityEstimate(
                self.mean - other.mean,
                self.combined_se(other),
                min(self.trials, other.trials),
            )
        return CapacityEstimate(self.mean - float(other), self.std_error, self.trials)

    def scaled(self, factor: float) -> "CapacityEstimate":
        return CapacityEstimate(self.mean * factor, self.std_error * abs(factor), self.trials)

    def as_dict(self) -> dict[str, float | int]:
        return asdict(self)

    def __str__(self) -> str:
        return f"{self.mean:.6g} ± {self.std_error:.2g} (N={self.trials})"


def trial_stream(master_seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(
        np.random.SeedSequence(master_seed, spawn_key=(_TRIAL_KEY, index))
    )


def block_stream(master_seed: int, block: int) -> np.random.Generator:
    return np.random.default_rng(
        np.random.SeedSequence(master_seed, spawn_key=(_BLOCK_KEY, block))
    )


def _run_blocks(
    plan: TrialPlan, block_fn: Callable[[int, int, int], npt.NDArray[Any]]
) -> npt.NDArray[Any]:
    """Evaluate ``block_fn(block, start, count)`` for every block, in index order."""
    results: list[npt.NDArray[Any] | None] = [None] * plan.blocks
    progress = tqdm(
        total=plan.trials,
        desc="trials",
        unit="trial",
        disable=not plan.show_progress,
        leave=False,
    )

    def work(block: int) -> npt.NDArray[Any]:
        start, count = plan.block_bounds(block)
        out = np.asarray(block_fn(block, start, count))
        if out.shape[0] != count:
            raise DomainError(f"block {block} returned {out.shape[0]} of {count} values")
        return out

    with progress:
        if plan.max_workers == 1 or plan.blocks == 1:
            for block in range(plan.blocks):
                results[block] = work(block)
                progress.update(results[block].shape[0])
        else:
            with ThreadPoolExecutor(max_workers=plan.max_workers) as executor:
                futures = {executor.submit(work, block): block for block in range(plan.blocks)}
                for future in as_completed(futures):
                    block = futures[future]
                    results[block] = future.result()
                    progress.update(results[block].shape[0])

    return np.concatenate(results, axis=0)


def collect_trials(plan: TrialPlan, trial_fn: TrialFn) -> npt.NDArray[np.float64]:
    """One value per trial; trial i reads only from ``trial_stream(seed, i)``."""

    def block_fn(block: int, start: int, count: int) -> npt.NDArray[np.float64]:
        return np.array(
            [trial_fn(trial_stream(plan.master_seed, i)) for i in range(start, start + count)],
            dtype=np.float64,
        )

    return _run_blocks(plan, block_fn)


def collect_batched(plan: TrialPlan, batch_fn: BatchFn) -> npt.NDArray[Any]:
    """
    Vectorized trials: ``batch_fn(rng, count)`` returns ``count`` rows for one
    block, drawing only from ``block_stream(seed, block)``.
    """

    def block_fn(block: int, start: int, count: int) -> npt.NDArray[Any]:
        return batch_fn(block_stream(plan.master_seed, block), count)

    return _run_blocks(plan, block_fn)


def run_estimate(plan: TrialPlan, trial_fn: TrialFn) -> CapacityEstimate:
    estimate = CapacityEstimate.from_samples(collect_trials(plan, trial_fn))
    logger.debug("run_estimate: %s", estimate)
    return estimate


def run_batched_estimate(plan: TrialPlan, batch_fn: BatchFn) -> CapacityEstimate:
    estimate = CapacityEstimate.from_samples(collect_batched(plan, batch_fn))
    logger.debug("run_batched_estimate: %s", estimate)
    return estimate


def ratio_estimate(numerator: npt.ArrayLike, denominator: npt.ArrayLike) -> CapacityEstimate:
    """E[X]/E[Y] from paired samples, with a delta-method standard error."""
    x = np.asarray(numerator, dtype=np.float64).ravel()
    y = np.asarray(denominator, dtype=np.float64).ravel()
    if x.shape != y.shape or x.size < 2:
        raise DomainError("ratio needs at least two paired samples")
    n = x.size
    mx, my = x.mean(), y.mean()
    if my == 0.0:
        raise DomainError("denominator mean is zero")
    cov = np.cov(x, y, ddof=1)
    var = (cov[0, 0] / my**2 - 2.0 * mx * cov[0, 1] / my**3 + mx**2 * cov[1, 1] / my**4) / n
    return CapacityEstimate(float(mx / my), float(math.sqrt(max(var, 0.0))), n)
