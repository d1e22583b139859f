"""Right-hand side of the alignment system and pairwise-distance queries.

The velocity equation for agent i is the weighted mean of coupled velocity
differences over all other agents:

    dv_i/dt = (1/N) sum_{j != i} psi(|x_i - x_j|) Gamma(v_j - v_i)

The j = i term is skipped: the weight is undefined at zero distance for the
singular families while Gamma(0) = 0, so skipping is the only consistent
reading. Summation order is fixed (ascending partner index per agent) so
trajectories are reproducible run to run; an optional compensated
accumulation mode is available through ``ModelParams.compensated_sum``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .coupling import make_coupling
from .errors import ParameterError, SingularityError
from .params import CouplingKind, ModelParams, WeightKind
from .state import ParticleState
from .weights import make_weight

_WEIGHT_CODE = {
    WeightKind.POWER_SINGULAR: kernels.WEIGHT_POWER,
    WeightKind.SHIFTED_SINGULAR: kernels.WEIGHT_SHIFTED,
    WeightKind.REGULAR_CS: kernels.WEIGHT_REGULAR,
}


@dataclass(frozen=True)
class Derivative:
    """Time derivative of a state: dx_i/dt and dv_i/dt, same shapes."""

    d_positions: np.ndarray
    d_velocities: np.ndarray


def _check_dynamics_params(params: ModelParams) -> None:
    if not params.dynamics_gamma_ok:
        raise ParameterError(
            f"dynamics require gamma in (1/2, 3/2], got {params.gamma}"
        )


def _eval_dvel_callbacks(pos: np.ndarray, vel: np.ndarray, params: ModelParams) -> np.ndarray:
    """Generic slow path for custom weight or coupling callbacks."""
    weight = make_weight(params)
    coupling = make_coupling(params)
    n = pos.shape[0]
    out = np.zeros_like(vel)
    for i in range(n):
        acc = np.zeros(pos.shape[1])
        for j in range(n):
            if j == i:
                continue
            diff = pos[j] - pos[i]
            dist = float(np.sqrt(diff @ diff))
            if not dist > weight.domain_min:
                raise SingularityError(i, j, dist)
            acc += weight.evaluate(dist) * np.asarray(
                coupling.evaluate(vel[j] - vel[i]), dtype=np.float64
            )
        out[i] = acc / n
    return out


def eval_dvel(pos: np.ndarray, vel: np.ndarray, params: ModelParams) -> np.ndarray:
    """Velocity derivative for raw (N, d) arrays.

    Raises SingularityError naming the offending pair if any gap is at or
    inside the weight singularity.
    """
    _check_dynamics_params(params)
    if (
        params.weight_kind is WeightKind.CUSTOM
        or params.coupling_kind is CouplingKind.CUSTOM
    ):
        return _eval_dvel_callbacks(pos, vel, params)
    code = _WEIGHT_CODE[params.weight_kind]
    # The linear coupling is the gamma = 1 power law.
    gamma = 1.0 if params.coupling_kind is CouplingKind.LINEAR else params.gamma
    dvel, bad_i, bad_j, bad_dist = kernels.rhs_dvel(
        np.ascontiguousarray(pos, dtype=np.float64),
        np.ascontiguousarray(vel, dtype=np.float64),
        code,
        params.alpha,
        params.delta,
        params.beta_cs,
        gamma,
        params.compensated_sum,
    )
    if bad_i >= 0:
        raise SingularityError(bad_i, bad_j, bad_dist)
    return dvel


def rhs(state: ParticleState, params: ModelParams) -> Derivative:
    """Full derivative of a state: positions move with the velocities."""
    if state.n_agents != params.n_agents or state.dim != params.dim:
        raise ParameterError(
            f"state shape ({state.n_agents}, {state.dim}) does not match params "
            f"({params.n_agents}, {params.dim})"
        )
    dvel = eval_dvel(state.positions, state.velocities, params)
    return Derivative(d_positions=state.velocities.copy(), d_velocities=dvel)


def min_pair_distance(state) -> tuple[float, tuple[int, int]]:
    """Minimum inter-agent distance and one arg-min pair (ties: smallest (i, j)).

    Accepts a ParticleState or a raw (N, d) position array.
    """
    pos = state.positions if isinstance(state, ParticleState) else np.asarray(state)
    if pos.shape[0] < 2:
        raise ParameterError("min_pair_distance needs at least two agents")
    dist, i, j = kernels.min_pair(np.ascontiguousarray(pos, dtype=np.float64))
    return float(dist), (int(i), int(j))
