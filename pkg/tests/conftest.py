import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from sflock.params import ModelParams
from sflock.state import ParticleState


def seeded_state(seed=0, n=6, d=2, extent=2.0, vscale=0.5, t=0.0):
    rng = np.random.default_rng(seed)
    pos = rng.uniform(0.0, extent, (n, d))
    vel = rng.uniform(-vscale, vscale, (n, d))
    return ParticleState(t, pos, vel)


@pytest.fixture
def power_params():
    return ModelParams(n_agents=6, dim=2, alpha=1.5, gamma=1.0)


@pytest.fixture
def state6(power_params):
    return seeded_state(seed=3, n=6, d=2)
