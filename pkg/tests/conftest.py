import numpy as np
import pytest

from ambient_capacity.channel import LinkSpec
from ambient_capacity.config import load_scenario_config
from ambient_capacity.scenario import make_scenario


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)


@pytest.fixture
def default_scenario():
    """Operating point of the published simulations (QPSK, alpha^2 = -20 dB)."""
    return make_scenario()


@pytest.fixture
def default_config():
    return load_scenario_config()


@pytest.fixture
def small_config():
    """Default scenario with trial counts small enough for quick pipeline runs."""
    return load_scenario_config(overrides=["mc.trials=2000", "mc.batch_size=500"])


def _random_links(
    rng: np.random.Generator,
    names: tuple[str, ...],
    max_order: int = 4,
    max_offset: int = 2,
) -> dict[str, LinkSpec]:
    return {
        name: LinkSpec(
            order=int(rng.integers(0, max_order + 1)),
            time_offset=int(rng.integers(0, max_offset + 1)),
            variance=float(rng.uniform(0.2, 2.0)),
        )
        for name in names
    }


@pytest.fixture
def random_links():
    """Sampler of random link orders, time offsets and tap variances."""
    return _random_links
