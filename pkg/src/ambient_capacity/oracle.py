"""
Time-domain brute-force propagation of one legacy frame.

Dense P x P Toeplitz matrices carry every link, with the inter-block
interference of the previous frame kept explicit. The frequency-domain
shortcuts in the capacity modules are tested against this module.
"""

import logging
from collections.abc import Iterable, Mapping
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt
from scipy.linalg import toeplitz

from .channel import ChannelDraw, LinkSpec
from .errors import DomainError, FrameConditionError
from .numerics import ComplexArray, unitary_dft

logger = logging.getLogger(__name__)

LEGACY = "legacy"
BACKSCATTER = "backscatter"
COLOCATED = "colocated"


@dataclass(frozen=True)
class FrameConfig:
    M: int = 32
    L_cp: int = 8

    def __post_init__(self) -> None:
        if not 0 < self.L_cp < self.M:
            raise DomainError(f"need 0 < L_cp < M, got L_cp={self.L_cp}, M={self.M}")

    @property
    def P(self) -> int:
        return self.M + self.L_cp

    def violations(
        self,
        links: Mapping[str, LinkSpec],
        receivers: Iterable[str] = (LEGACY, BACKSCATTER, COLOCATED),
    ) -> list[str]:
        """Every frame inequality that fails, one message each."""
        found: list[str] = []

        def span(*names: str) -> tuple[str, int]:
            label = "+".join(f"L{n}" for n in names) + "+" + "+".join(f"θ{n}" for n in names)
            return label, sum(links[n].span for n in names)

        def require_cp(*names: str) -> None:
            if not all(n in links for n in names):
                return
            label, value = span(*names)
            if self.L_cp < value:
                found.append(f"CP condition: L_cp ≥ {label} violated: {self.L_cp} < {value}")

        def require_frame(*names: str) -> None:
            if not all(n in links for n in names):
                return
            label, value = span(*names)
            if value > self.P - 1:
                found.append(f"IBI condition: {label} ≤ P-1 violated: {value} > {self.P - 1}")

        for name in links:
            require_frame(name)

        receivers = set(receivers)
        if LEGACY in receivers:
            require_cp("13")
            require_cp("12", "23")
            require_frame("12", "23")
        if BACKSCATTER in receivers:
            require_cp("14")
            require_cp("24")
            require_cp("12", "24")
            require_frame("12", "24")
        if COLOCATED in receivers:
            require_cp("11")
            require_cp("12", "21")
            require_frame("12", "21")
        return found

    def validate(
        self,
        links: Mapping[str, LinkSpec],
        receivers: Iterable[str] = (LEGACY, BACKSCATTER, COLOCATED),
    ) -> None:
        found = self.violations(links, receivers)
        if found:
            raise FrameConditionError(found[0])


@dataclass
class FrameSignals:
    """Time-domain vectors of frame n (length P each); x2 = alpha b(n) r2."""

    u_curr: ComplexArray
    u_prev: ComplexArray
    r2: ComplexArray
    x2: ComplexArray
    x2_prev: ComplexArray
    r3_time: ComplexArray
    r4_time: ComplexArray | None


def shift_toeplitz_pair(
    taps: npt.ArrayLike, theta: int, P: int
) -> tuple[npt.NDArray[np.complex128], npt.NDArray[np.complex128]]:
    """
    Current-frame and previous-frame convolution matrices of a delayed link.

    C0 = sum_l c(l) F^{l+theta} is lower triangular, C1 = sum_l c(l) B^{P-l-theta}
    upper triangular, so C0 x(n) + C1 x(n-1) is the frame-n window of the
    linear convolution of the stream [x(n-1); x(n)].
    """
    taps = np.asarray(taps, dtype=np.complex128)
    L = taps.size - 1
    if L + theta > P - 1:
        raise FrameConditionError(f"IBI condition: L+θ ≤ P-1 violated: {L + theta} > {P - 1}")

    col = np.zeros(P, dtype=np.complex128)
    col[theta : theta + L + 1] = taps
    c0 = toeplitz(col, np.r_[col[0], np.zeros(P - 1, dtype=np.complex128)])

    row = np.zeros(P, dtype=np.complex128)
    for ell, c in enumerate(taps):
        j = P - ell - theta
        if j < P:
            row[j] = c
    c1 = toeplitz(np.zeros(P, dtype=np.complex128), row)
    return c0, c1


def legacy_modulate(s: npt.ArrayLike, cfg: FrameConfig) -> ComplexArray:
    """Unitary IDFT of the M data symbols followed by cyclic-prefix insertion."""
    x = unitary_dft(s, inverse=True, size=cfg.M)
    return np.concatenate([x[cfg.M - cfg.L_cp :], x])


def cfo_ramp(nu: float, length: int, start: int = 0, M: int = 1) -> ComplexArray:
    return np.exp(2j * np.pi * nu * (start + np.arange(length)) / M)


class _LinkMatrices:
    """Lazily built Toeplitz pairs of one channel draw."""

    def __init__(self, draw: ChannelDraw, links: Mapping[str, LinkSpec], P: int) -> None:
        self._draw = draw
        self._links = links
        self._P = P
        self._pairs: dict[str, tuple[np.ndarray, np.ndarray]] = {}

    def __call__(self, link: str) -> tuple[np.ndarray, np.ndarray]:
        if link not in self._pairs:
            self._pairs[link] = shift_toeplitz_pair(
                self._draw[link], self._links[link].time_offset, self._P
            )
        return self._pairs[link]

    def through(self, link: str, curr: np.ndarray, prev: np.ndarray) -> np.ndarray:
        c0, c1 = self(link)
        return c0 @ curr + c1 @ prev


def _backscatter_blocks(
    mats: _LinkMatrices,
    cfg: FrameConfig,
    s_curr: ComplexArray,
    s_prev: ComplexArray,
    s_prev2: ComplexArray | None,
    b_curr: complex,
    b_prev: complex,
    alpha: float,
) -> tuple[ComplexArray, ComplexArray, ComplexArray, ComplexArray, ComplexArray]:
    u_curr = legacy_modulate(s_curr, cfg)
    u_prev = legacy_modulate(s_prev, cfg)
    u_prev2 = (
        np.zeros(cfg.P, dtype=np.complex128)
        if s_prev2 is None
        else legacy_modulate(s_prev2, cfg)
    )
    r2 = mats.through("12", u_curr, u_prev)
    r2_prev = mats.through("12", u_prev, u_prev2)
    x2 = alpha * b_curr * r2
    x2_prev = alpha * b_prev * r2_prev
    return u_curr, u_prev, r2, x2, x2_prev


def _noise(noise: npt.ArrayLike | None, P: int) -> ComplexArray:
    if noise is None:
        return np.zeros(P, dtype=np.complex128)
    noise = np.asarray(noise, dtype=np.complex128)
    if noise.shape != (P,):
        raise DomainError(f"noise vector must have length P={P}")
    return noise


def propagate_frame(
    draw: ChannelDraw,
    links: Mapping[str, LinkSpec],
    cfg: FrameConfig,
    s_curr: npt.ArrayLike,
    s_prev: npt.ArrayLike,
    b_curr: complex,
    b_prev: complex,
    alpha: float,
    noise3: npt.ArrayLike | None = None,
    noise4: npt.ArrayLike | None = None,
    nu: float = 0.0,
    n: int = 0,
    s_prev2: npt.ArrayLike | None = None,
) -> FrameSignals:
    """
    Propagate legacy frame n to the legacy receiver and, when links 14 and 24
    are drawn, to the separated backscatter receiver with CFO ``nu``.

    ``s_prev2`` feeds the inter-block term of r2(n-1); zeros when omitted.
    """
    receivers = [LEGACY]
    with_brx = "14" in draw.taps and "24" in draw.taps
    if with_brx:
        receivers.append(BACKSCATTER)
    cfg.validate(links, receivers)

    P = cfg.P
    mats = _LinkMatrices(draw, links, P)
    u_curr, u_prev, r2, x2, x2_prev = _backscatter_blocks(
        mats, cfg, s_curr, s_prev, s_prev2, b_curr, b_prev, alpha
    )

    r3 = mats.through("13", u_curr, u_prev) + mats.through("23", x2, x2_prev)
    r3 = r3 + _noise(noise3, P)

    r4 = None
    if with_brx:
        clean = mats.through("14", u_curr, u_prev) + mats.through("24", x2, x2_prev)
        phase = np.exp(2j * np.pi * nu * n * P / cfg.M)
        r4 = phase * cfo_ramp(nu, P, M=cfg.M) * clean + _noise(noise4, P)

    logger.debug("propagated frame n=%d (P=%d, nu=%.3g)", n, P, nu)
    return FrameSignals(
        u_curr=u_curr,
        u_prev=u_prev,
        r2=r2,
        x2=x2,
        x2_prev=x2_prev,
        r3_time=r3,
        r4_time=r4,
    )


def lrx_demodulate(r3_time: npt.ArrayLike, cfg: FrameConfig) -> ComplexArray:
    """Drop the CP and apply the unitary DFT."""
    r3_time = np.asarray(r3_time, dtype=np.complex128)
    return unitary_dft(r3_time[cfg.L_cp :], size=cfg.M)


def brx_reduce(
    r4_time: npt.ArrayLike, cfg: FrameConfig, nu: float = 0.0, n: int = 0
) -> ComplexArray:
    """Drop the first L_cp samples and counter-rotate the residual CFO."""
    r4_time = np.asarray(r4_time, dtype=np.complex128)
    kept = r4_time[cfg.L_cp :]
    return kept * np.conj(cfo_ramp(nu, cfg.M, start=n * cfg.P + cfg.L_cp, M=cfg.M))


def propagate_colocated(
    draw: ChannelDraw,
    links: Mapping[str, LinkSpec],
    cfg: FrameConfig,
    s_curr: npt.ArrayLike,
    s_prev: npt.ArrayLike,
    b_curr: complex,
    b_prev: complex,
    alpha: float,
    noise1: npt.ArrayLike | None = None,
    s_prev2: npt.ArrayLike | None = None,
) -> ComplexArray:
    """
    Block received back at the legacy transmitter: self-interference over
    link 11 plus the round trip 1 -> 2 -> 1.
    """
    cfg.validate(links, [COLOCATED])
    mats = _LinkMatrices(draw, links, cfg.P)
    u_curr, u_prev, _, x2, x2_prev = _backscatter_blocks(
        mats, cfg, s_curr, s_prev, s_prev2, b_curr, b_prev, alpha
    )
    r1 = mats.through("11", u_curr, u_prev) + mats.through("21", x2, x2_prev)
    return r1 + _noise(noise1, cfg.P)


def colocated_reduce(
    r1_time: npt.ArrayLike,
    draw: ChannelDraw,
    links: Mapping[str, LinkSpec],
    cfg: FrameConfig,
    s_curr: npt.ArrayLike,
) -> ComplexArray:
    """
    Subtract the known self-interference C11^(0) u(n), drop the CP and apply
    the unitary DFT; the result is alpha b Psi12 Psi21 s + noise.
    """
    c0, _ = shift_toeplitz_pair(draw["11"], links["11"].time_offset, cfg.P)
    cleaned = np.asarray(r1_time, dtype=np.complex128) - c0 @ legacy_modulate(s_curr, cfg)
    return unitary_dft(cleaned[cfg.L_cp :], size=cfg.M)


def sufficient_statistic(psi: npt.ArrayLike, r1: npt.ArrayLike) -> complex:
    """z1 = psi^H r1."""
    return complex(np.vdot(psi, r1))
