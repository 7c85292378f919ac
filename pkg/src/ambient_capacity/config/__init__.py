"""
Scenario configuration: structured schema, packaged YAML and resolution to a ``Scenario``.

Sources merge in order: schema defaults, a YAML file, then dotted overrides
such as ``power.snr_l_db=10``.
"""

import copy
import hashlib
import json
import logging
import math
import pathlib
from collections.abc import Iterable, Mapping
from typing import Any, NamedTuple

import numpy as np
import omegaconf
import yaml
from omegaconf import DictConfig, OmegaConf

from ..channel import LINKS
from ..errors import AmbientCapacityError, ConfigValidationError
from ..frontend import AskNormalization, ConstellationKind
from ..scenario import MARGINAL, TAPS, Scenario, make_scenario
from .schema import (
    ConstellationSection,
    FrameSection,
    GeometrySection,
    LinkSection,
    LinksSection,
    McSection,
    NodesSection,
    OptionsSection,
    PowerSection,
    RateSection,
    ScenarioConfig,
)

__all__ = [
    "ConstellationSection",
    "FrameSection",
    "GeometrySection",
    "LinkSection",
    "LinksSection",
    "McSection",
    "NodesSection",
    "OptionsSection",
    "PowerSection",
    "RateSection",
    "ScenarioConfig",
    "ResolvedGeometry",
    "apply_overrides",
    "config_hash",
    "config_path",
    "debug_config",
    "load_scenario_config",
    "merge_dotlist",
    "plan_options",
    "resolve_geometry",
    "to_scenario",
    "validate_config",
]

# fields that change how a run executes but not what it computes
_EXECUTION_ONLY = ("workers", "progress")


def config_path() -> str:
    return str(pathlib.Path(__file__).parent.absolute())


def default_config_file() -> str:
    return str(pathlib.Path(config_path()) / "scenario.yaml")


def _wrap(exc: Exception) -> ConfigValidationError:
    return ConfigValidationError(str(exc).strip())


def load_scenario_config(
    path: str | None = None, overrides: Iterable[str] = ()
) -> DictConfig:
    """Merge schema defaults, the YAML at ``path`` and dotted overrides, then validate."""
    schema = OmegaConf.structured(ScenarioConfig)
    try:
        cfg = OmegaConf.merge(schema, OmegaConf.load(path or default_config_file()))
    except (omegaconf.errors.OmegaConfBaseException, OSError, yaml.YAMLError) as e:
        raise _wrap(e) from e
    cfg = merge_dotlist(cfg, overrides)
    validate_config(cfg)
    return cfg


def merge_dotlist(cfg: DictConfig, dotlist: Iterable[str]) -> DictConfig:
    """Merge ``key=value`` strings (omegaconf dotlist grammar) into ``cfg``."""
    dotlist = list(dotlist)
    if not dotlist:
        return cfg
    try:
        return OmegaConf.merge(cfg, OmegaConf.from_dotlist(dotlist))
    except omegaconf.errors.OmegaConfBaseException as e:
        raise _wrap(e) from e


def apply_overrides(cfg: DictConfig, overrides: Mapping[str, Any]) -> DictConfig:
    """Copy of ``cfg`` with dotted keys set; types are checked against the schema."""
    out = copy.deepcopy(cfg)
    try:
        for key, value in overrides.items():
            OmegaConf.update(out, key, value, merge=True)
    except omegaconf.errors.OmegaConfBaseException as e:
        raise _wrap(e) from e
    return out


class ResolvedGeometry(NamedTuple):
    d12: float
    d13: float
    d14: float
    phi: float
    theta: float
    eta: float


def _point(value: Any, name: str) -> np.ndarray:
    point = np.asarray(list(value), dtype=np.float64)
    if point.shape != (2,) or not np.all(np.isfinite(point)):
        raise ConfigValidationError(f"geometry.nodes.{name} must be two finite coordinates")
    return point


def _angle(u: np.ndarray, v: np.ndarray) -> float:
    cos = np.dot(u, v) / (np.linalg.norm(u) * np.linalg.norm(v))
    return float(np.arccos(np.clip(cos, -1.0, 1.0)))


def resolve_geometry(geometry: GeometrySection | DictConfig) -> ResolvedGeometry:
    """Distances and angles (radians), taking node coordinates where given."""
    d12, d13, d14 = geometry.d12, geometry.d13, geometry.d14
    phi = math.radians(geometry.phi_deg)
    theta = math.radians(geometry.theta_deg)

    nodes = geometry.nodes
    if nodes is not None:
        ltx = _point(nodes.ltx, "ltx")
        to_lrx = _point(nodes.lrx, "lrx") - ltx
        d13 = float(np.linalg.norm(to_lrx))
        if nodes.btx is not None:
            to_btx = _point(nodes.btx, "btx") - ltx
            d12 = float(np.linalg.norm(to_btx))
            if d12 == 0.0 or d13 == 0.0:
                raise ConfigValidationError("BTx and LRx must not sit on the LTx")
            phi = _angle(to_btx, to_lrx)
            if nodes.brx is not None:
                to_brx = _point(nodes.brx, "brx") - ltx
                d14 = float(np.linalg.norm(to_brx))
                if d14 == 0.0:
                    raise ConfigValidationError("a separated BRx must not sit on the LTx")
                theta = _angle(to_btx, to_brx)
        elif nodes.brx is not None:
            raise ConfigValidationError("geometry.nodes.brx needs geometry.nodes.btx")

    return ResolvedGeometry(d12=d12, d13=d13, d14=d14, phi=phi, theta=theta, eta=geometry.eta)


def to_scenario(cfg: DictConfig, validate_frame: bool = True) -> Scenario:
    geometry = resolve_geometry(cfg.geometry)
    links = {
        name: (cfg.links[f"c{name}"].order, cfg.links[f"c{name}"].time_offset)
        for name in LINKS
    }
    power = cfg.power
    try:
        return make_scenario(
            M=cfg.frame.M,
            L_cp=cfg.frame.L_cp,
            link_overrides=links,
            d12=geometry.d12,
            d13=geometry.d13,
            d14=geometry.d14,
            phi=geometry.phi,
            theta=geometry.theta,
            eta=geometry.eta,
            constellation=cfg.constellation.kind,
            normalization=cfg.constellation.normalization,
            alpha_sq_db=power.alpha_sq_db,
            snr_l_db=power.snr_l_db,
            snr_b1_db=power.snr_b1_db,
            snr_b4_db=power.snr_b4_db,
            noise4_db=power.noise4_db,
            sigma_s_sq=power.sigma_s_sq,
            self_interference_var=power.self_interference_var,
            rate_rs=cfg.rate.rs,
            sampling=cfg.mc.sampling,
            published_conventions=cfg.options.published_conventions,
            mixture_samples=cfg.mc.mixture_samples,
            validate_frame=validate_frame,
        )
    except ConfigValidationError:
        raise
    except AmbientCapacityError as e:
        raise _wrap(e) from e


def validate_config(cfg: DictConfig) -> None:
    """Checks the schema cannot express, then a full resolve (frame conditions included)."""
    if cfg.mc.trials < 1:
        raise ConfigValidationError(f"mc.trials must be >= 1, got {cfg.mc.trials}")
    if cfg.mc.workers < 1 or cfg.mc.batch_size < 1:
        raise ConfigValidationError("mc.workers and mc.batch_size must be >= 1")
    if cfg.mc.sampling not in (MARGINAL, TAPS):
        raise ConfigValidationError(f"mc.sampling must be '{MARGINAL}' or '{TAPS}'")
    if cfg.constellation.kind.upper() not in ConstellationKind.__members__:
        raise ConfigValidationError(f"unknown constellation kind: {cfg.constellation.kind}")
    if cfg.constellation.normalization not in {n.value for n in AskNormalization}:
        raise ConfigValidationError(
            f"unknown normalization: {cfg.constellation.normalization}"
        )
    to_scenario(cfg)


def plan_options(cfg: DictConfig) -> dict[str, Any]:
    return {
        "batch_size": cfg.mc.batch_size,
        "max_workers": cfg.mc.workers,
        "show_progress": cfg.mc.progress,
    }


def config_hash(cfg: DictConfig) -> str:
    """Short digest of everything that affects the numbers."""
    container = OmegaConf.to_container(cfg, resolve=True)
    assert isinstance(container, dict)
    for key in _EXECUTION_ONLY:
        container["mc"].pop(key, None)
    container.pop("quantities", None)
    blob = json.dumps(container, sort_keys=True)
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()[:16]


def debug_config(cfg: DictConfig, logger: logging.Logger) -> None:
    full_config = OmegaConf.to_container(cfg, resolve=True)
    logger.info(yaml.dump(data=full_config, sort_keys=False))
