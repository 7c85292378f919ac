"""Typed scenario configuration used as an omegaconf structured config."""

from dataclasses import dataclass, field
from typing import List, Optional


@dataclass
class FrameSection:
    M: int = 32
    L_cp: int = 8


@dataclass
class LinkSection:
    order: int = 3
    time_offset: int = 1


@dataclass
class LinksSection:
    c12: LinkSection = field(default_factory=LinkSection)
    c13: LinkSection = field(default_factory=LinkSection)
    c23: LinkSection = field(default_factory=LinkSection)
    c14: LinkSection = field(default_factory=LinkSection)
    c24: LinkSection = field(default_factory=LinkSection)
    c21: LinkSection = field(default_factory=LinkSection)
    c11: LinkSection = field(default_factory=LinkSection)


@dataclass
class NodesSection:
    """Cartesian node positions; ``btx``/``brx`` override d12/phi and d14/theta."""

    ltx: List[float] = field(default_factory=lambda: [-0.5, 0.0])
    lrx: List[float] = field(default_factory=lambda: [0.5, 0.0])
    btx: Optional[List[float]] = None
    brx: Optional[List[float]] = None


@dataclass
class GeometrySection:
    d12: float = 0.2
    d13: float = 1.0
    d14: float = 1.0
    phi_deg: float = 10.0
    theta_deg: float = 60.0
    eta: float = 3.0
    nodes: Optional[NodesSection] = None


@dataclass
class PowerSection:
    snr_l_db: float = 20.0
    # null puts the backscatter transmitter to sleep
    alpha_sq_db: Optional[float] = -20.0
    snr_b1_db: float = 0.0
    snr_b4_db: float = 0.0
    noise4_db: Optional[float] = None
    sigma_s_sq: float = 1.0
    self_interference_var: float = 1.0


@dataclass
class ConstellationSection:
    kind: str = "QPSK"
    normalization: str = "max_amplitude"


@dataclass
class McSection:
    trials: int = 1_000_000
    seed: int = 0
    batch_size: int = 4096
    workers: int = 1
    sampling: str = "marginal"
    mixture_samples: int = 256
    progress: bool = False


@dataclass
class RateSection:
    rs: float = 6.0


@dataclass
class OptionsSection:
    published_conventions: bool = False


@dataclass
class ScenarioConfig:
    frame: FrameSection = field(default_factory=FrameSection)
    links: LinksSection = field(default_factory=LinksSection)
    geometry: GeometrySection = field(default_factory=GeometrySection)
    power: PowerSection = field(default_factory=PowerSection)
    constellation: ConstellationSection = field(default_factory=ConstellationSection)
    mc: McSection = field(default_factory=McSection)
    rate: RateSection = field(default_factory=RateSection)
    options: OptionsSection = field(default_factory=OptionsSection)
    quantities: List[str] = field(
        default_factory=lambda: ["c3_no_backscatter", "c3_semianalytic", "delta_c3"]
    )
