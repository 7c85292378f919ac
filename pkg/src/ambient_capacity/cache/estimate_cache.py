"""
Per-point estimate cache so an interrupted sweep resumes where it stopped.
"""

import logging
import os
from pathlib import Path
from typing import Dict, Optional

from ..mc_engine import CapacityEstimate
from ..utils.file_utils import load_json, save_json

logger = logging.getLogger(__name__)


def estimate_key(quantity: str, config_hash: str, trials: int, seed: int) -> str:
    return f"{quantity}|{config_hash}|{trials}|{seed}"


class EstimateCache:
    """
    Estimates keyed by ``estimate_key``, persisted as one JSON object in
    ``<cache_dir>/<cache_name>_cache.json`` and rewritten after every insert.
    """

    def __init__(self, cache_dir: str = "outputs/cache", cache_name: str = "estimates"):
        self.path = Path(cache_dir) / f"{cache_name}_cache.json"
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self._estimates: Dict[str, CapacityEstimate] = self._read()

    def _read(self) -> Dict[str, CapacityEstimate]:
        if not self.path.exists():
            return {}
        try:
            records = load_json(str(self.path))
            estimates = {key: CapacityEstimate(**record) for key, record in records.items()}
        except (ValueError, TypeError, AttributeError) as e:
            # unreadable file: recompute everything rather than trust it
            logger.warning(f"Ignoring estimate cache {self.path}: {e}")
            return {}
        logger.info(f"Loaded {len(estimates)} cached estimates from {self.path}")
        return estimates

    def _write(self) -> None:
        tmp = self.path.with_suffix(".tmp")
        save_json({key: e.as_dict() for key, e in self._estimates.items()}, str(tmp))
        os.replace(tmp, self.path)

    def get(self, key: str) -> Optional[CapacityEstimate]:
        return self._estimates.get(key)

    def set(self, key: str, estimate: CapacityEstimate) -> None:
        self._estimates[key] = estimate
        self._write()

    def has(self, key: str) -> bool:
        return key in self._estimates

    def clear(self) -> None:
        self._estimates.clear()
        self._write()

    def size(self) -> int:
        return len(self._estimates)
