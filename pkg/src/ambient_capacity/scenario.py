"""Resolved numerical view of one operating point."""

from collections.abc import Mapping
from dataclasses import dataclass, replace
from types import MappingProxyType

import numpy as np

from .channel import LINKS, LinkSpec, NetworkGeometry
from .errors import DomainError
from .frontend import AskNormalization, Constellation, standard_constellation
from .oracle import FrameConfig

MARGINAL = "marginal"
TAPS = "taps"


def db_to_linear(db: float) -> float:
    return float(10.0 ** (db / 10.0))


@dataclass(frozen=True)
class Scenario:
    """
    Everything an estimator needs, in linear units.

    ``snr_b1`` and ``snr_b4`` are alpha^2 sigma_b^2 / sigma_v^2 at the
    co-located and separated backscatter receivers; ``sigma_v4_sq`` is kept
    alongside so the separated model stays defined in sleep mode (alpha = 0).
    """

    frame: FrameConfig
    links: Mapping[str, LinkSpec]
    geometry: NetworkGeometry
    constellation: Constellation
    snr_l: float = 100.0
    snr_b1: float = 1.0
    snr_b4: float = 1.0
    sigma_v4_sq: float = 1e-4
    sigma_s_sq: float = 1.0
    rate_rs: float = 6.0
    sampling: str = MARGINAL
    published_conventions: bool = False
    mixture_samples: int = 256

    def __post_init__(self) -> None:
        if self.sampling not in (MARGINAL, TAPS):
            raise DomainError(f"sampling must be '{MARGINAL}' or '{TAPS}'")
        if self.snr_l < 0 or self.snr_b1 < 0 or self.snr_b4 < 0:
            raise DomainError("SNRs must be nonnegative")
        if not (self.sigma_s_sq > 0 and self.sigma_v4_sq > 0):
            raise DomainError("sigma_s^2 and sigma_v4^2 must be > 0")
        object.__setattr__(self, "links", MappingProxyType(dict(self.links)))

    @property
    def M(self) -> int:
        return self.frame.M

    @property
    def alpha(self) -> float:
        return self.constellation.alpha

    @property
    def sigma_b_sq(self) -> float:
        return self.constellation.sigma_b_sq

    def variance(self, link: str) -> float:
        return self.links[link].variance

    @property
    def gamma13(self) -> float:
        return self.variance("13") * self.snr_l

    @property
    def sigma_v3_sq(self) -> float:
        return self.sigma_s_sq / self.snr_l

    def asleep(self) -> "Scenario":
        """The same operating point with the backscatter transmitter in sleep mode."""
        return replace(
            self, constellation=self.constellation.with_alpha(0.0), snr_b1=0.0, snr_b4=0.0
        )


def make_scenario(
    *,
    M: int = 32,
    L_cp: int = 8,
    order: int = 3,
    time_offset: int = 1,
    link_overrides: Mapping[str, tuple[int, int]] | None = None,
    d12: float = 0.2,
    d13: float = 1.0,
    d14: float = 1.0,
    phi: float = np.pi / 18,
    theta: float = np.pi / 3,
    eta: float = 3.0,
    constellation: str = "QPSK",
    normalization: str = AskNormalization.MAX_AMPLITUDE.value,
    alpha_sq_db: float | None = -20.0,
    snr_l_db: float = 20.0,
    snr_b1_db: float = 0.0,
    snr_b4_db: float = 0.0,
    noise4_db: float | None = None,
    sigma_s_sq: float = 1.0,
    self_interference_var: float = 1.0,
    rate_rs: float = 6.0,
    sampling: str = MARGINAL,
    published_conventions: bool = False,
    mixture_samples: int = 256,
    validate_frame: bool = True,
) -> Scenario:
    """
    Build a ``Scenario`` from plain operating-point parameters.

    ``alpha_sq_db = None`` puts the backscatter transmitter in sleep mode.
    When ``noise4_db`` is given it fixes sigma_v4^2 / sigma_s^2 and SNR_B4 is
    derived from it; otherwise sigma_v4^2 follows from ``snr_b4_db``.
    """
    if alpha_sq_db is not None and alpha_sq_db > 0.0:
        raise DomainError("alpha^2 must not exceed 0 dB")
    alpha = 0.0 if alpha_sq_db is None else float(np.sqrt(db_to_linear(alpha_sq_db)))
    if published_conventions and constellation.upper() == "ASK4":
        normalization = AskNormalization.UNIT_ENERGY.value
    symbols = standard_constellation(constellation.upper(), alpha, normalization)

    geometry = NetworkGeometry(d12=d12, d13=d13, d14=d14, phi=phi, theta=theta, eta=eta)
    overrides = dict(link_overrides or {})
    links = {}
    for name in LINKS:
        link_order, link_offset = overrides.get(name, (order, time_offset))
        links[name] = LinkSpec(
            order=link_order,
            time_offset=link_offset,
            variance=geometry.link_variance(name, self_interference_var),
        )

    frame = FrameConfig(M=M, L_cp=L_cp)
    if validate_frame:
        frame.validate(links)

    energy = alpha**2 * symbols.sigma_b_sq
    if noise4_db is not None:
        sigma_v4_sq = sigma_s_sq * db_to_linear(noise4_db)
        snr_b4 = energy / sigma_v4_sq
    elif energy > 0.0:
        snr_b4 = db_to_linear(snr_b4_db)
        sigma_v4_sq = energy / snr_b4
    else:
        # sleep mode: keep a 0 dB noise floor so Lambda stays positive
        snr_b4 = 0.0
        sigma_v4_sq = sigma_s_sq

    return Scenario(
        frame=frame,
        links=links,
        geometry=geometry,
        constellation=symbols,
        snr_l=db_to_linear(snr_l_db),
        snr_b1=0.0 if alpha == 0.0 else db_to_linear(snr_b1_db),
        snr_b4=snr_b4,
        sigma_v4_sq=sigma_v4_sq,
        sigma_s_sq=sigma_s_sq,
        rate_rs=rate_rs,
        sampling=sampling,
        published_conventions=published_conventions,
        mixture_samples=mixture_samples,
    )
