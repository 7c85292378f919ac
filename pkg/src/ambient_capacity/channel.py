"""
Network geometry and Rayleigh frequency-selective links.

Link names are two-character strings "ik" for the i -> k hop between nodes
1 (legacy transmitter), 2 (backscatter transmitter), 3 (legacy receiver) and
4 (backscatter receiver). "11" is the self-interference path of a co-located
backscatter receiver.
"""

from collections.abc import Mapping
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
import numpy.typing as npt

from .errors import CoincidentNodeError, DomainError
from .numerics import ComplexArray

LINKS: tuple[str, ...] = ("12", "13", "23", "14", "24", "21", "11")


@dataclass(frozen=True)
class LinkSpec:
    """Order L, integer time offset theta and total power sigma^2 of one link."""

    order: int
    time_offset: int
    variance: float

    def __post_init__(self) -> None:
        if self.order < 0 or self.time_offset < 0:
            raise DomainError("link order and time offset must be >= 0")
        if not self.variance > 0.0:
            raise DomainError(f"link variance must be > 0, got {self.variance}")

    @property
    def tap_variance(self) -> float:
        return self.variance / (self.order + 1)

    @property
    def span(self) -> int:
        """L + theta, the last sample index the link can reach."""
        return self.order + self.time_offset


def path_loss_variance(d: float, eta: float) -> float:
    if not d > 0.0:
        raise DomainError(f"distance must be > 0, got {d}")
    return float(d ** (-eta))


def carnot_distance(a: float, b: float, angle: float) -> float:
    """Third side of the triangle with sides ``a``, ``b`` and enclosed ``angle``."""
    if not (a > 0.0 and b > 0.0):
        raise DomainError("Carnot's law needs a, b > 0")
    sq = a * a + b * b - 2.0 * a * b * np.cos(angle)
    d = float(np.sqrt(max(sq, 0.0)))
    if d <= 1e-15 * max(a, b):
        raise CoincidentNodeError(f"nodes coincide (a={a}, b={b}, angle={angle})")
    return d


class MobilityExtrema(NamedTuple):
    in_set_a: bool
    d_min: float | None
    d_max: float | None


def mobility_extrema(angle: float) -> MobilityExtrema:
    """
    Stationary points of the legacy capacity gain along d12/d13.

    The gain (d12 * d23)^-eta has stationary points at the roots of
    2 d^2 - 3 cos(phi) d + 1 = 0; none exist when 9 cos^2(phi) - 8 < 0.
    """
    c = np.cos(angle)
    disc = 9.0 * c * c - 8.0
    if disc < 0.0:
        return MobilityExtrema(True, None, None)
    root = np.sqrt(disc)
    d_min = max(0.0, (3.0 * c - root) / 4.0)
    d_max = max(0.0, (3.0 * c + root) / 4.0)
    return MobilityExtrema(False, float(d_min), float(d_max))


@dataclass(frozen=True)
class NetworkGeometry:
    """
    Node distances and angles in normalized units.

    ``phi`` is the angle at node 1 between the 1->2 and 1->3 directions;
    ``theta`` the angle at node 1 between 1->2 and 1->4.
    """

    d12: float
    d13: float = 1.0
    d14: float = 1.0
    phi: float = np.pi / 18
    theta: float = np.pi / 3
    eta: float = 3.0

    def __post_init__(self) -> None:
        for name in ("d12", "d13", "d14"):
            if not getattr(self, name) > 0.0:
                raise DomainError(f"{name} must be > 0")
        if not self.eta > 0.0:
            raise DomainError("path-loss exponent must be > 0")

    @property
    def d23(self) -> float:
        return carnot_distance(self.d12, self.d13, self.phi)

    @property
    def d24(self) -> float:
        return carnot_distance(self.d12, self.d14, self.theta)

    def distance(self, link: str) -> float:
        return {
            "12": self.d12,
            "21": self.d12,
            "13": self.d13,
            "14": self.d14,
            "23": self.d23,
            "24": self.d24,
        }[link]

    def link_variance(self, link: str, self_interference: float = 1.0) -> float:
        if link == "11":
            return self_interference
        return path_loss_variance(self.distance(link), self.eta)


def draw_taps(
    spec: LinkSpec, rng: np.random.Generator, size: int | tuple[int, ...] | None = None
) -> ComplexArray:
    """
    i.i.d. CN(0, sigma^2/(L+1)) taps; ``size`` prepends batch dimensions.
    """
    shape = (spec.order + 1,) if size is None else (*np.atleast_1d(size), spec.order + 1)
    scale = np.sqrt(spec.tap_variance / 2.0)
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def draw_marginal_response(
    variance: float, rng: np.random.Generator, shape: int | tuple[int, ...]
) -> ComplexArray:
    """Per-subcarrier draws from the exact marginal Psi(m) ~ CN(0, variance)."""
    scale = np.sqrt(variance / 2.0)
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def freq_response(taps: npt.ArrayLike, theta: int, M: int) -> ComplexArray:
    """
    Psi(m) = e^{-j2 pi theta m/M} sum_l c(l) e^{-j2 pi l m/M}, m = 0..M-1.

    Leading axes of ``taps`` are treated as a batch.
    """
    taps = np.asarray(taps, dtype=np.complex128)
    m = np.arange(M)
    ell = np.arange(taps.shape[-1]) + theta
    kernel = np.exp(-2j * np.pi * np.outer(ell, m) / M)
    return taps @ kernel


def composite_legacy_response(
    psi13: ComplexArray,
    psi12: ComplexArray,
    psi23: ComplexArray,
    alpha: float,
    b: complex | ComplexArray,
) -> ComplexArray:
    """Psi3(m) = Psi13(m) + alpha b Psi12(m) Psi23(m); ``b`` broadcasts over m."""
    psi13, psi12, psi23 = np.broadcast_arrays(psi13, psi12, psi23)
    b = np.asarray(b)
    if b.ndim:
        b = b[..., None]
    return psi13 + alpha * b * psi12 * psi23


def cascade_taps(a: npt.ArrayLike, b: npt.ArrayLike) -> ComplexArray:
    return np.convolve(np.asarray(a, dtype=np.complex128), np.asarray(b, dtype=np.complex128))


@dataclass
class ChannelDraw:
    """One joint realization of every link's taps for a coherence interval."""

    taps: dict[str, ComplexArray] = field(default_factory=dict)

    @classmethod
    def draw(
        cls, links: Mapping[str, LinkSpec], rng: np.random.Generator
    ) -> "ChannelDraw":
        # fixed link order keeps draws reproducible for a given stream
        return cls({name: draw_taps(links[name], rng) for name in LINKS if name in links})

    def __getitem__(self, link: str) -> ComplexArray:
        return self.taps[link]

    def response(self, link: str, links: Mapping[str, LinkSpec], M: int) -> ComplexArray:
        return freq_response(self.taps[link], links[link].time_offset, M)
