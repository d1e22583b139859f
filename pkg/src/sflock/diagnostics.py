"""Trajectory observables: moments, deviations, flocking tests, and regime fits.

The three kinetic moments are m0 = N (agent count), m1 = sum of velocities
(conserved by the odd coupling), and m2 = sum of squared speeds (dissipated).
Spread is measured by the standard deviations sigma_x and sigma_v about the
arithmetic centers; a system flocks when sigma_x stays bounded while sigma_v
decays to zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from . import kernels
from .errors import InsufficientData, IntegralUndefined, DomainError, ParameterError
from .params import ModelParams, WeightKind
from .state import ParticleState
from .weights import make_weight


def moments(state: ParticleState):
    """(m0, m1, m2): agent count, total velocity vector, total squared speed."""
    vel = state.velocities
    m1 = vel.sum(axis=0)
    m2 = float((vel * vel).sum())
    return state.n_agents, m1, m2


def deviations(state: ParticleState):
    """(sigma_x, sigma_v, x_center, v_center) with centers the arithmetic means."""
    pos, vel = state.positions, state.velocities
    xc = pos.mean(axis=0)
    vc = vel.mean(axis=0)
    sx = math.sqrt(float(((pos - xc) ** 2).sum()) / state.n_agents)
    sv = math.sqrt(float(((vel - vc) ** 2).sum()) / state.n_agents)
    return sx, sv, xc, vc


def admissible_c2(gamma: float, c1: float, n: int) -> float:
    """A constant that provably bounds the sigma_v dissipation rate.

    Derived from the kinetic dissipation inequality plus the power-mean bound
    relating the pairwise speed-difference sum to sigma_v: 2^(gamma-1) * c1,
    with an extra N^(2 gamma - 2) factor when gamma < 1.
    """
    scale = c1 * 2.0 ** (gamma - 1.0)
    if gamma < 1.0:
        scale *= float(n) ** (2.0 * gamma - 2.0)
    return scale


def _scaled_tail_integral(sigma_x0: float, params: ModelParams) -> float:
    """Integral of psi(2 sqrt(N) s) ds from sigma_x0 to infinity; inf if divergent."""
    two_sqrt_n = 2.0 * math.sqrt(params.n_agents)
    lower = two_sqrt_n * sigma_x0
    kind = params.weight_kind
    if kind is WeightKind.POWER_SINGULAR:
        if params.alpha <= 1.0:
            return math.inf
        return lower ** (1.0 - params.alpha) / (params.alpha - 1.0) / two_sqrt_n
    if kind is WeightKind.SHIFTED_SINGULAR:
        if params.alpha <= 1.0:
            return math.inf
        if lower <= params.delta:
            raise DomainError(
                f"2 sqrt(N) sigma_x(0) = {lower} is not above the shift {params.delta}"
            )
        return (lower - params.delta) ** (1.0 - params.alpha) / (
            params.alpha - 1.0
        ) / two_sqrt_n
    if kind is WeightKind.REGULAR_CS:
        if params.beta_cs <= 0.5:
            return math.inf
        from scipy.integrate import quad

        val, _ = quad(lambda u: (1.0 + u * u) ** (-params.beta_cs), lower, math.inf)
        return val / two_sqrt_n
    from scipy.integrate import quad

    weight = make_weight(params)
    val, _ = quad(lambda s: weight.evaluate(two_sqrt_n * s), sigma_x0, math.inf)
    return val


def flocking_condition(initial: ParticleState, params: ModelParams, c2: float):
    """Initial-configuration test sigma_v(0)^(3-2 gamma) <= c2 (3-2 gamma) * tail.

    The tail integral diverges for heavy-tailed weights, in which case the
    condition holds unconditionally and the right side is reported as +inf.
    Returns (satisfied, lhs, rhs).
    """
    if not (0.5 < params.gamma < 1.5):
        raise ParameterError("flocking_condition requires gamma in (1/2, 3/2)")
    if c2 <= 0:
        raise ParameterError("c2 must be > 0")
    sx0, sv0, _, _ = deviations(initial)
    singular = params.weight_kind in (
        WeightKind.POWER_SINGULAR,
        WeightKind.SHIFTED_SINGULAR,
    )
    if sx0 == 0.0 and singular:
        raise IntegralUndefined(
            "all agents coincide: the tail integral starts at the singularity"
        )
    lhs = sv0 ** (3.0 - 2.0 * params.gamma)
    tail = _scaled_tail_integral(sx0, params)
    rhs = c2 * (3.0 - 2.0 * params.gamma) * tail
    return lhs <= rhs, lhs, rhs


def default_s_ref(initial: ParticleState, params: ModelParams) -> float:
    """Reference spread for the dissipation functionals on singular weights.

    Half the initial minimum gap above the singularity shift, mapped through
    the 2 sqrt(N) argument scaling; 0 for regular weights, whose integral
    converges at the origin.
    """
    if params.weight_kind is WeightKind.REGULAR_CS:
        return 0.0
    min0, _, _ = kernels.min_pair(initial.positions)
    return (params.delta + 0.5 * (min0 - params.delta)) / (
        2.0 * math.sqrt(params.n_agents)
    )


def lyapunov(
    state: ParticleState,
    params: ModelParams,
    c2: float,
    sign: int,
    s_ref: Optional[float] = None,
) -> float:
    """Dissipation functional sigma_v^(3-2g)/(3-2g) +/- c2 * integral of the weight.

    For singular weights the integral from 0 diverges, so it is taken from the
    reference spread ``s_ref``; only differences of the functional along a
    trajectory carry meaning in that case.
    """
    if params.gamma == 1.5:
        raise ParameterError("the functional is undefined at gamma = 3/2")
    if sign not in (1, -1):
        raise ParameterError("sign must be +1 or -1")
    singular = params.weight_kind is not WeightKind.REGULAR_CS
    if s_ref is None:
        if singular:
            raise ParameterError("singular weights need an explicit s_ref")
        s_ref = 0.0
    sx, sv, _, _ = deviations(state)
    if singular and sx < s_ref:
        raise DomainError(
            f"sigma_x = {sx} is below the reference spread s_ref = {s_ref}"
        )
    weight = make_weight(params)
    two_sqrt_n = 2.0 * math.sqrt(params.n_agents)
    if sx == s_ref:
        integral = 0.0
    else:
        integral = (
            float(weight.primitive(two_sqrt_n * sx))
            - float(weight.primitive(two_sqrt_n * s_ref))
        ) / two_sqrt_n
    exp = 3.0 - 2.0 * params.gamma
    return sv**exp / exp + sign * c2 * integral


@dataclass(frozen=True)
class DiagnosticsFrame:
    """Per-sample observables, written to diagnostics.csv by the harness."""

    m0: int
    m1: np.ndarray
    m2: float
    sigma_x: float
    sigma_v: float
    x_center: np.ndarray
    v_center: np.ndarray
    min_dist: float
    lyapunov_plus: float
    lyapunov_minus: float
    l_beta: float


def build_frame(
    state: ParticleState,
    params: ModelParams,
    c2: float = 1.0,
    s_ref: Optional[float] = None,
    l_beta_exp: Optional[float] = None,
) -> DiagnosticsFrame:
    """Compute one frame; dissipation functionals fall back to NaN off-domain."""
    from .guards import beta_distance

    m0, m1, m2 = moments(state)
    sx, sv, xc, vc = deviations(state)
    min_dist, _ = _min_dist_pair(state)
    if l_beta_exp is None:
        l_beta_exp = frame_beta_exponent(params)
    try:
        l_beta = beta_distance(state, l_beta_exp, params.delta)
    except DomainError:
        l_beta = math.nan
    try:
        e_plus = lyapunov(state, params, c2, +1, s_ref)
        e_minus = lyapunov(state, params, c2, -1, s_ref)
    except (DomainError, ParameterError):
        e_plus = math.nan
        e_minus = math.nan
    return DiagnosticsFrame(
        m0=m0,
        m1=m1,
        m2=m2,
        sigma_x=sx,
        sigma_v=sv,
        x_center=xc,
        v_center=vc,
        min_dist=min_dist,
        lyapunov_plus=e_plus,
        lyapunov_minus=e_minus,
        l_beta=l_beta,
    )


def frame_beta_exponent(params: ModelParams) -> float:
    """Gap-functional exponent recorded per frame: alpha/(2 gamma) - 1, floored at 0."""
    return max(params.alpha / (2.0 * params.gamma) - 1.0, 0.0)


def _min_dist_pair(state: ParticleState):
    dist, i, j = kernels.min_pair(state.positions)
    return float(dist), (int(i), int(j))


class FlockRegime(Enum):
    FINITE_TIME = "finite_time"
    EXPONENTIAL = "exponential"
    ALGEBRAIC = "algebraic"
    NO_FLOCK = "no_flock"
    UNDETERMINED = "undetermined"


@dataclass(frozen=True)
class FlockReport:
    regime: FlockRegime
    fit_quality: float
    sup_sigma_x: float
    rate: Optional[float] = None
    exponent: Optional[float] = None
    t_star: Optional[float] = None


def _linfit(x: np.ndarray, y: np.ndarray):
    """Least-squares line fit returning (slope, intercept, r_squared)."""
    slope, intercept = np.polyfit(x, y, 1)
    pred = slope * x + intercept
    ss_res = float(((y - pred) ** 2).sum())
    ss_tot = float(((y - y.mean()) ** 2).sum())
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return float(slope), float(intercept), r2


FINITE_TIME_FACTOR = 1e-12
R2_THRESHOLD = 0.99


def classify_flocking(record, params: ModelParams) -> FlockReport:
    """Fit the sigma_v decay of a completed record to one of three regimes.

    Tried in order: a finite-time hit (sigma_v below 1e-12 of its initial
    value before the final sample), an exponential fit of ln sigma_v against
    t, and an algebraic fit of ln sigma_v against ln t on the tail half.
    """
    times = np.array([s.time for s in record.samples])
    if times.size < 50:
        raise InsufficientData(
            f"classification needs >= 50 samples, record has {times.size}"
        )
    sigma_v = np.empty_like(times)
    sigma_x = np.empty_like(times)
    for k, s in enumerate(record.samples):
        sx, sv, _, _ = deviations(s.state)
        sigma_v[k] = sv
        sigma_x[k] = sx
    sup_sx = float(sigma_x.max())
    sv0 = sigma_v[0]

    if sv0 == 0.0:
        return FlockReport(
            FlockRegime.FINITE_TIME, 1.0, sup_sx, t_star=float(times[0])
        )

    hits = np.nonzero((sigma_v <= FINITE_TIME_FACTOR * sv0) & (times < times[-1]))[0]
    if hits.size:
        return FlockReport(
            FlockRegime.FINITE_TIME, 1.0, sup_sx, t_star=float(times[hits[0]])
        )

    decayed = sigma_v[-1] < sv0

    pos_mask = sigma_v > 0.0
    if decayed and pos_mask.sum() >= 3:
        slope, _, r2 = _linfit(times[pos_mask], np.log(sigma_v[pos_mask]))
        if r2 >= R2_THRESHOLD and slope < 0.0:
            return FlockReport(FlockRegime.EXPONENTIAL, r2, sup_sx, rate=-slope)

    half = times.size // 2
    tail_mask = pos_mask.copy()
    tail_mask[:half] = False
    tail_mask &= times > 0.0
    if decayed and tail_mask.sum() >= 3:
        slope, _, r2 = _linfit(
            np.log(times[tail_mask]), np.log(sigma_v[tail_mask])
        )
        if r2 >= R2_THRESHOLD and slope < 0.0:
            return FlockReport(FlockRegime.ALGEBRAIC, r2, sup_sx, exponent=slope)

    if not decayed:
        return FlockReport(FlockRegime.NO_FLOCK, 0.0, sup_sx)
    return FlockReport(FlockRegime.UNDETERMINED, 0.0, sup_sx)
