"""Adaptive time stepping with a singularity-aware proximity guard.

The stepper is an embedded Dormand-Prince 5(4) pair with standard error
control, plus one extra rejection rule: a step is rejected and halved whenever
the minimum inter-agent gap (distance above the singularity shift) would
change by more than a fraction ``proximity_fraction`` of its pre-step value.
The guard certifies that the integrator never jumps across a near-collision;
when the guard keeps rejecting down to the step-size floor, the run aborts
with :class:`~sflock.errors.SingularityStall` rather than regularizing the
weight, which would silently change the model.

Sampling uses cubic Hermite interpolation between accepted steps, so emitting
a dense output grid never perturbs the trajectory itself.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import List, Optional

import numpy as np

from . import kernels
from .diagnostics import build_frame, default_s_ref
from .dynamics import eval_dvel
from .errors import ParameterError, SingularityError, SingularityStall
from .params import ModelParams
from .state import ParticleState

# Dormand-Prince 5(4) tableau; the last row of A equals B so the final stage
# is the derivative at the accepted point (reused as the next first stage).
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    np.array([]),
    np.array([1 / 5]),
    np.array([3 / 40, 9 / 40]),
    np.array([44 / 45, -56 / 15, 32 / 9]),
    np.array([19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729]),
    np.array([9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656]),
    np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84]),
]
_B = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_E = np.array(
    [71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40]
)

_MIN_FACTOR = 0.2
_MAX_FACTOR = 5.0
_SAFETY = 0.9


@dataclass(frozen=True)
class IntegratorConfig:
    """Step-control settings.

    ``dt_min = None`` derives the floor as 1e-12 of the integration horizon.
    ``proximity_fraction`` is the largest relative change of the minimum gap
    the guard tolerates within one step.
    """

    rel_tol: float = 1e-8
    abs_tol: float = 1e-10
    dt_init: float = 1e-3
    dt_min: Optional[float] = None
    dt_max: float = 1.0
    proximity_fraction: float = 0.2
    max_steps: int = 1_000_000

    def __post_init__(self):
        if self.rel_tol <= 0 or self.abs_tol <= 0:
            raise ParameterError("tolerances must be > 0")
        if self.dt_init <= 0 or self.dt_max <= 0:
            raise ParameterError("dt_init and dt_max must be > 0")
        if self.dt_min is not None and not 0 < self.dt_min <= self.dt_init:
            raise ParameterError("need 0 < dt_min <= dt_init")
        if self.dt_init > self.dt_max:
            raise ParameterError("need dt_init <= dt_max")
        if not 0.0 < self.proximity_fraction < 1.0:
            raise ParameterError("proximity_fraction must lie in (0, 1)")
        if self.max_steps < 1:
            raise ParameterError("max_steps must be >= 1")


@dataclass(frozen=True)
class NearCollision:
    time: float
    pair: tuple
    distance: float
    kind: str = "near_collision"


@dataclass(frozen=True)
class StepRejected:
    time: float
    reason: str
    kind: str = "step_rejected"


@dataclass(frozen=True)
class FlockDetected:
    time: float
    kind: str = "flock_detected"


class TerminalStatus(Enum):
    COMPLETED = "completed"
    ABORTED_SINGULARITY = "aborted_singularity"
    ABORTED_MAX_STEPS = "aborted_max_steps"


@dataclass(frozen=True)
class TrajectorySample:
    time: float
    state: ParticleState
    frame: object


@dataclass
class TrajectoryRecord:
    samples: List[TrajectorySample]
    events: list
    terminal_status: TerminalStatus

    @property
    def times(self) -> np.ndarray:
        return np.array([s.time for s in self.samples])

    @property
    def completed(self) -> bool:
        return self.terminal_status is TerminalStatus.COMPLETED

    def frame_series(self, attr: str) -> np.ndarray:
        return np.array([getattr(s.frame, attr) for s in self.samples])

    @classmethod
    def from_states(cls, states: List[ParticleState], completed: bool = True):
        """Wrap externally produced states (e.g. a parsed CSV) as a record."""
        samples = [TrajectorySample(s.time, s, None) for s in states]
        status = TerminalStatus.COMPLETED if completed else TerminalStatus.ABORTED_SINGULARITY
        return cls(samples=samples, events=[], terminal_status=status)


@dataclass(frozen=True)
class StepResult:
    state: ParticleState
    dt_used: float
    dt_next: float
    events: tuple
    f_start: np.ndarray
    f_end: np.ndarray


def _pack(state: ParticleState) -> np.ndarray:
    return np.stack([state.positions, state.velocities])


def _derivative(y: np.ndarray, params: ModelParams) -> np.ndarray:
    return np.stack([y[1], eval_dvel(y[0], y[1], params)])


def _min_gap(pos: np.ndarray, delta: float) -> float:
    d, _, _ = kernels.min_pair(np.ascontiguousarray(pos))
    return float(d) - delta


def _error_norm(err: np.ndarray, y0: np.ndarray, y1: np.ndarray, cfg) -> float:
    scale = cfg.abs_tol + cfg.rel_tol * np.maximum(np.abs(y0), np.abs(y1))
    return float(np.sqrt(np.mean((err / scale) ** 2)))


def _attempt(y0, f0, dt, params):
    """One trial step: returns (y1, f_end, err) or raises SingularityError."""
    k = [f0]
    for s in range(1, 7):
        ys = y0 + dt * np.tensordot(_A[s], np.stack(k[:s]), axes=1)
        k.append(_derivative(ys, params))
    karr = np.stack(k)
    y1 = y0 + dt * np.tensordot(_B, karr, axes=1)
    err = dt * np.tensordot(_E, karr, axes=1)
    return y1, k[6], err


def step_adaptive(
    state: ParticleState,
    params: ModelParams,
    cfg: IntegratorConfig,
    dt: Optional[float] = None,
    f_start: Optional[np.ndarray] = None,
    dt_floor: Optional[float] = None,
) -> StepResult:
    """Advance by one accepted adaptive step.

    Retries with smaller steps on error-control or proximity-guard rejections;
    raises SingularityStall when the guard rejects at the step-size floor.
    """
    if dt_floor is None:
        dt_floor = cfg.dt_min if cfg.dt_min is not None else 1e-12 * max(cfg.dt_max, cfg.dt_init)
    y0 = _pack(state)
    f0 = f_start if f_start is not None else _derivative(y0, params)
    dt_try = min(max(cfg.dt_init if dt is None else dt, dt_floor), cfg.dt_max)
    gap0 = _min_gap(y0[0], params.delta)
    if gap0 <= 0.0:
        raise SingularityError(-1, -1, gap0 + params.delta, "state starts outside the weight domain")

    events = []
    rejected = False
    while True:
        try:
            y1, f_end, err = _attempt(y0, f0, dt_try, params)
            trouble = None
            if not np.isfinite(y1).all():
                trouble = "nonfinite"
        except SingularityError:
            trouble = "singular_stage"
            y1 = f_end = err = None

        if trouble is None:
            err_norm = _error_norm(err, y0, y1, cfg)
            if err_norm > 1.0:
                if dt_try <= dt_floor * (1.0 + 1e-12):
                    # Cannot refine further; accept the floor step and say so.
                    events.append(StepRejected(state.time, "error_at_dt_floor"))
                else:
                    events.append(StepRejected(state.time, "error"))
                    rejected = True
                    factor = max(_MIN_FACTOR, _SAFETY * err_norm ** -0.2)
                    dt_try = max(dt_try * factor, dt_floor)
                    continue
            gap1 = _min_gap(y1[0], params.delta)
            if gap1 <= 0.0 or abs(gap1 - gap0) > cfg.proximity_fraction * gap0:
                reason = "gap_crossed" if gap1 <= 0.0 else "proximity"
                if dt_try <= dt_floor * (1.0 + 1e-12):
                    raise SingularityStall(state.time, dt_try, gap0)
                events.append(StepRejected(state.time, reason))
                rejected = True
                dt_try = max(dt_try * 0.5, dt_floor)
                continue
            break

        # A stage left the weight domain or produced non-finite values.
        if dt_try <= dt_floor * (1.0 + 1e-12):
            raise SingularityStall(state.time, dt_try, gap0)
        events.append(StepRejected(state.time, trouble))
        rejected = True
        dt_try = max(dt_try * 0.5, dt_floor)

    if err_norm == 0.0:
        growth = _MAX_FACTOR
    else:
        growth = min(_MAX_FACTOR, _SAFETY * err_norm ** -0.2)
    if rejected:
        growth = min(growth, 1.0)
    dt_next = min(max(dt_try * growth, dt_floor), cfg.dt_max)

    new_state = ParticleState(state.time + dt_try, y1[0], y1[1])
    return StepResult(
        state=new_state,
        dt_used=dt_try,
        dt_next=dt_next,
        events=tuple(events),
        f_start=f0,
        f_end=f_end,
    )


def _hermite(y0, y1, f0, f1, dt, theta):
    h00 = 2 * theta**3 - 3 * theta**2 + 1
    h10 = theta**3 - 2 * theta**2 + theta
    h01 = -2 * theta**3 + 3 * theta**2
    h11 = theta**3 - theta**2
    return h00 * y0 + h10 * dt * f0 + h01 * y1 + h11 * dt * f1


def simulate(
    initial: ParticleState,
    params: ModelParams,
    cfg: IntegratorConfig,
    t_final: float,
    sample_every: float,
    c2: float = 1.0,
    s_ref: Optional[float] = None,
) -> TrajectoryRecord:
    """Integrate to ``t_final``, emitting a diagnostics sample on a fixed grid.

    Samples land at ``initial.time + k * sample_every`` (via step
    interpolation) plus the final time. An unresolvable approach to collision
    ends the run early with the last resolvable state recorded and status
    ``ABORTED_SINGULARITY``.
    """
    t0 = initial.time
    if not t_final > t0:
        raise ParameterError("t_final must exceed the initial time")
    if not 0.0 < sample_every <= t_final - t0:
        raise ParameterError("sample_every must lie in (0, t_final - t0]")
    if initial.n_agents != params.n_agents or initial.dim != params.dim:
        raise ParameterError("initial state shape does not match params")
    min0, i0, j0 = kernels.min_pair(initial.positions)
    if min0 <= params.delta:
        raise SingularityError(
            i0, j0, min0, "initial gaps must exceed the singularity shift"
        )

    dt_floor = cfg.dt_min if cfg.dt_min is not None else 1e-12 * (t_final - t0)
    if s_ref is None:
        s_ref = default_s_ref(initial, params)

    def frame_of(state):
        return build_frame(state, params, c2=c2, s_ref=s_ref)

    samples = [TrajectorySample(t0, initial, frame_of(initial))]
    events: list = []
    sigma_v0 = samples[0].frame.sigma_v
    gap_initial = min0 - params.delta
    near_collision_seen = set()
    flock_seen = False

    def emit(time, state):
        nonlocal flock_seen
        fr = frame_of(state)
        samples.append(TrajectorySample(time, state, fr))
        if (
            not flock_seen
            and sigma_v0 > 0.0
            and fr.sigma_v <= 1e-12 * sigma_v0
        ):
            flock_seen = True
            events.append(FlockDetected(time))

    state = initial
    f_curr = _derivative(_pack(initial), params)
    dt = min(max(cfg.dt_init, dt_floor), cfg.dt_max)
    k_sample = 1
    next_t = t0 + sample_every
    t_tol = 1e-9 * sample_every
    status = TerminalStatus.COMPLETED
    steps = 0

    while state.time < t_final - t_tol:
        dt_cap = t_final - state.time
        dt_try = min(dt, dt_cap)
        try:
            res = step_adaptive(
                state, params, cfg, dt=dt_try, f_start=f_curr, dt_floor=min(dt_floor, dt_cap)
            )
        except SingularityStall as stall:
            events.append(StepRejected(stall.time, "singularity_stall"))
            status = TerminalStatus.ABORTED_SINGULARITY
            break
        events.extend(res.events)

        t_old, t_new = state.time, res.state.time
        y0, y1 = _pack(state), _pack(res.state)
        while next_t <= t_new + t_tol and next_t < t_final - t_tol:
            theta = (next_t - t_old) / res.dt_used
            yi = _hermite(y0, y1, res.f_start, res.f_end, res.dt_used, theta)
            emit(next_t, ParticleState(next_t, yi[0], yi[1]))
            k_sample += 1
            next_t = t0 + k_sample * sample_every

        gap_new = _min_gap(res.state.positions, params.delta)
        if gap_new < 1e-2 * gap_initial:
            d, i, j = kernels.min_pair(res.state.positions)
            if (i, j) not in near_collision_seen:
                near_collision_seen.add((i, j))
                events.append(NearCollision(t_new, (i, j), float(d)))

        state = res.state
        f_curr = res.f_end
        dt = res.dt_next
        steps += 1
        if steps >= cfg.max_steps and state.time < t_final - t_tol:
            status = TerminalStatus.ABORTED_MAX_STEPS
            break

    if status is TerminalStatus.COMPLETED:
        if state.time > samples[-1].time + t_tol:
            emit(state.time, state)
    else:
        # Record the last resolvable state.
        if state.time > samples[-1].time + t_tol:
            emit(state.time, state)

    return TrajectoryRecord(samples=samples, events=events, terminal_status=status)


def oracle_integrate(
    initial: ParticleState, params: ModelParams, dt: float, n_steps: int
) -> ParticleState:
    """Classical fixed-step fourth-order Runge-Kutta reference.

    Bit-reproducible given the fixed summation order; raises SingularityError
    if any stage leaves the weight domain. Negative ``dt`` integrates
    backwards.
    """
    if dt == 0.0:
        raise ParameterError("dt must be nonzero")
    if n_steps < 0:
        raise ParameterError("n_steps must be >= 0")
    y = _pack(initial)
    t = initial.time
    half = dt / 2.0
    sixth = dt / 6.0
    for _ in range(n_steps):
        k1 = _derivative(y, params)
        k2 = _derivative(y + half * k1, params)
        k3 = _derivative(y + half * k2, params)
        k4 = _derivative(y + dt * k3, params)
        y = y + sixth * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        t += dt
    return ParticleState(t, y[0], y[1])
