"""
Backscatter transmitter front-end.

Constellations, power-wave reflection coefficients, chip impedances and the
fraction of incident power left for the energy harvester.
"""

import logging
from dataclasses import dataclass, field, replace
from enum import Enum
from itertools import combinations

import numpy as np
import numpy.typing as npt

from .errors import DegenerateCircuitError, DomainError

logger = logging.getLogger(__name__)

_TOL = 1e-12


class ConstellationKind(str, Enum):
    BPSK = "BPSK"
    QPSK = "QPSK"
    ASK4 = "ASK4"


class AskNormalization(str, Enum):
    """How 4-ASK is scaled: largest magnitude 1, or unit mean energy."""

    MAX_AMPLITUDE = "max_amplitude"
    UNIT_ENERGY = "unit_energy"


@dataclass(frozen=True, eq=False)
class Constellation:
    """
    Backscatter symbol set {beta_q} with probabilities {p_q} and scaling alpha.

    ``allow_overdrive`` relaxes the amplitude constraint |beta_q| <= 1; it is
    only meant for the unit-energy 4-ASK variant.
    """

    points: npt.NDArray[np.complex128]
    probabilities: npt.NDArray[np.float64]
    alpha: float = 1.0
    name: str = "custom"
    allow_overdrive: bool = False
    _distances: npt.NDArray[np.float64] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        points = np.asarray(self.points, dtype=np.complex128).ravel()
        probs = np.asarray(self.probabilities, dtype=np.float64).ravel()
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "probabilities", probs)

        if points.size < 2:
            raise DomainError("a constellation needs at least two points")
        if probs.shape != points.shape:
            raise DomainError("points and probabilities differ in length")
        if np.any(probs < 0.0) or abs(probs.sum() - 1.0) > 1e-12:
            raise DomainError("probabilities must be nonnegative and sum to 1")
        if not 0.0 <= self.alpha <= 1.0:
            raise DomainError(f"alpha must lie in [0, 1], got {self.alpha}")

        distances = np.abs(points[:, None] - points[None, :])
        object.__setattr__(self, "_distances", distances)
        if self.delta_min <= 0.0:
            raise DomainError("constellation points must be pairwise distinct")

        if not self.allow_overdrive:
            if np.any(np.abs(points) > 1.0 + _TOL):
                raise DomainError("amplitude constraint |beta_q| <= 1 violated")
            if self.sigma_b_sq > 1.0 + _TOL:
                raise DomainError("mean symbol energy exceeds 1")

    @property
    def size(self) -> int:
        return int(self.points.size)

    @property
    def sigma_b_sq(self) -> float:
        return float(np.sum(self.probabilities * np.abs(self.points) ** 2))

    @property
    def delta_min(self) -> float:
        return float(min(self._distances[i, j] for i, j in combinations(range(self.size), 2)))

    @property
    def squared_distances(self) -> npt.NDArray[np.float64]:
        """Q x Q matrix of |beta_q1 - beta_q2|^2."""
        return self._distances**2

    @property
    def gammas(self) -> npt.NDArray[np.complex128]:
        return self.alpha * self.points

    @property
    def is_constant_modulus(self) -> bool:
        mags = np.abs(self.points)
        return bool(np.allclose(mags, mags[0], rtol=0.0, atol=1e-12))

    @property
    def is_equiprobable(self) -> bool:
        return bool(np.allclose(self.probabilities, 1.0 / self.size, rtol=0.0, atol=1e-15))

    @property
    def is_distance_invariant(self) -> bool:
        """Every point sees the same multiset of distances (PSK-like sets)."""
        rows = np.sort(self._distances, axis=1)
        return bool(np.allclose(rows, rows[0], rtol=0.0, atol=1e-12))

    def with_alpha(self, alpha: float) -> "Constellation":
        return replace(self, alpha=alpha)


@dataclass(frozen=True)
class Impedance:
    resistance: float
    reactance: float = 0.0

    def __post_init__(self) -> None:
        if not (np.isfinite(self.resistance) and np.isfinite(self.reactance)):
            raise DomainError("impedance components must be finite")
        if self.resistance < 0.0:
            raise DomainError(f"passive impedance needs R >= 0, got {self.resistance}")

    @property
    def value(self) -> complex:
        return complex(self.resistance, self.reactance)

    @classmethod
    def from_complex(cls, z: complex) -> "Impedance":
        return cls(resistance=float(z.real), reactance=float(z.imag))


@dataclass(frozen=True)
class ReflectionCoefficient:
    value: complex

    def __post_init__(self) -> None:
        object.__setattr__(self, "value", complex(self.value))
        if abs(self.value) > 1.0 + _TOL:
            raise DomainError(f"|Gamma| must not exceed 1, got {abs(self.value)}")


def reflection_from_symbol(c: Constellation, q: int) -> ReflectionCoefficient:
    """Gamma_q = alpha * beta_q for the 0-based symbol index ``q``."""
    if not 0 <= q < c.size:
        raise DomainError(f"symbol index {q} outside [0, {c.size})")
    return ReflectionCoefficient(c.alpha * c.points[q])


def chip_impedance(za: Impedance, gamma: ReflectionCoefficient) -> Impedance:
    """Chip impedance that realizes ``gamma`` against antenna impedance ``za``."""
    g = gamma.value
    if g == -1.0:
        logger.debug(f"open circuit requested against Z^a = {za.value}")
        raise DegenerateCircuitError("Gamma = -1 has no finite chip impedance")
    z = za.value
    zc = (z.conjugate() - z * g) / (1.0 + g)
    # |Gamma| = 1 puts R on the boundary; drop rounding noise below zero
    resistance = zc.real
    if resistance < 0.0 and resistance > -1e-9 * max(abs(zc), 1.0):
        logger.debug(f"clamping R = {resistance:.3g} to 0 at |Gamma| = 1")
        resistance = 0.0
    return Impedance(resistance=resistance, reactance=zc.imag)


def reflection_from_impedance(za: Impedance, zc: Impedance) -> ReflectionCoefficient:
    denominator = za.value + zc.value
    if denominator == 0:
        logger.debug(f"Z^c = {zc.value} cancels Z^a = {za.value}")
        raise DegenerateCircuitError("Z^a + Z^c = 0")
    return ReflectionCoefficient((za.value.conjugate() - zc.value) / denominator)


def harvested_fraction(gamma: ReflectionCoefficient) -> float:
    return 1.0 - abs(gamma.value) ** 2


def average_harvested_fraction(c: Constellation) -> float:
    """Mean harvested fraction over the symbol distribution, 1 - alpha^2 sigma_b^2."""
    return float(np.sum(c.probabilities * (1.0 - np.abs(c.gammas) ** 2)))


def standard_constellation(
    kind: ConstellationKind | str,
    alpha: float,
    normalization: AskNormalization | str = AskNormalization.MAX_AMPLITUDE,
) -> Constellation:
    """
    Equiprobable BPSK, QPSK or symmetric 4-ASK.

    4-ASK is {+-1, +-1/3} (sigma_b^2 = 5/9) under max-amplitude normalization
    and {+-3/sqrt(5), +-1/sqrt(5)} (sigma_b^2 = 1, overdriven) under unit energy.
    """
    kind = ConstellationKind(kind)
    normalization = AskNormalization(normalization)

    overdrive = False
    if kind is ConstellationKind.BPSK:
        points = np.array([1.0, -1.0], dtype=np.complex128)
    elif kind is ConstellationKind.QPSK:
        points = np.exp(1j * (np.pi / 4 + np.arange(4) * np.pi / 2))
    else:
        points = np.array([-1.0, -1.0 / 3.0, 1.0 / 3.0, 1.0], dtype=np.complex128)
        if normalization is AskNormalization.UNIT_ENERGY:
            points = points * 3.0 / np.sqrt(5.0)
            overdrive = True

    probs = np.full(points.size, 1.0 / points.size)
    return Constellation(
        points=points,
        probabilities=probs,
        alpha=alpha,
        name=kind.value,
        allow_overdrive=overdrive,
    )
