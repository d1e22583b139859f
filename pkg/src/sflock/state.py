"""Phase-space snapshot of the particle system."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParameterError


def _locked_array(a, name):
    arr = np.array(a, dtype=np.float64, order="C", copy=True)
    if arr.ndim != 2:
        raise ParameterError(f"{name} must be a 2-d array, got shape {arr.shape}")
    if not np.isfinite(arr).all():
        raise ParameterError(f"{name} contains non-finite entries")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class ParticleState:
    """Positions and velocities of N agents in d dimensions at one instant.

    Arrays are copied and write-locked on construction, so a state is safe to
    share across threads and reuse in records.
    """

    time: float
    positions: np.ndarray
    velocities: np.ndarray

    def __post_init__(self):
        pos = _locked_array(self.positions, "positions")
        vel = _locked_array(self.velocities, "velocities")
        if pos.shape != vel.shape:
            raise ParameterError(
                f"positions {pos.shape} and velocities {vel.shape} differ in shape"
            )
        if pos.shape[0] < 1:
            raise ParameterError("state needs at least one agent")
        if not (np.isfinite(self.time) and self.time >= 0):
            raise ParameterError("time must be finite and >= 0")
        object.__setattr__(self, "time", float(self.time))
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "velocities", vel)

    @property
    def n_agents(self) -> int:
        return self.positions.shape[0]

    @property
    def dim(self) -> int:
        return self.positions.shape[1]
