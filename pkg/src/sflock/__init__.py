"""Alignment dynamics with singular communication weights.

A simulation library and CLI for N-agent velocity-alignment systems where the
interaction strength diverges as agents approach each other. Includes an
adaptive integrator with a collision-aware proximity guard, a fixed-step
verification oracle, trajectory diagnostics (kinetic moments, spread,
dissipation functionals, flocking-regime fits), and runtime monitors for the
inequalities that govern collision avoidance and minimum-gap growth.

The pairwise kernels run through a compiled extension when available and fall
back to a pure-Python implementation otherwise; ``kernel_backend()`` reports
which one is active.
"""

from .coupling import AxiomReport, CouplingFunction, check_axioms, coupling_eval, make_coupling
from .diagnostics import (
    DiagnosticsFrame,
    FlockRegime,
    FlockReport,
    admissible_c2,
    classify_flocking,
    deviations,
    flocking_condition,
    lyapunov,
    moments,
)
from .dynamics import Derivative, min_pair_distance, rhs
from .errors import (
    ConditionFailed,
    ConfigError,
    DegenerateGroup,
    DomainError,
    HypothesisViolated,
    InsufficientData,
    IntegralUndefined,
    ParameterError,
    SflockError,
    SingularityError,
    SingularityStall,
    UnsupportedError,
)
from .guards import (
    BoundReport,
    CollisionGroup,
    DissipationConstants,
    GroupFluctuations,
    Theorem3Report,
    auto_select_group,
    beta_distance,
    classify_regime,
    dissipation_check,
    eqmot_check,
    group_fluctuations,
    momeq_check,
    regime_sequence,
    theorem2_check,
    theorem3_check,
)
from .integrator import (
    IntegratorConfig,
    StepResult,
    TerminalStatus,
    TrajectoryRecord,
    oracle_integrate,
    simulate,
    step_adaptive,
)
from .kernels import backend as kernel_backend
from .params import CouplingKind, CustomWeight, ModelParams, WeightKind
from .state import ParticleState
from .weights import WeightFunction, make_weight, weight_eval, weight_primitive

__version__ = "0.1.0"

__all__ = [
    "AxiomReport",
    "BoundReport",
    "CollisionGroup",
    "ConditionFailed",
    "ConfigError",
    "CouplingFunction",
    "CouplingKind",
    "CustomWeight",
    "DegenerateGroup",
    "Derivative",
    "DiagnosticsFrame",
    "DissipationConstants",
    "DomainError",
    "FlockRegime",
    "FlockReport",
    "GroupFluctuations",
    "HypothesisViolated",
    "InsufficientData",
    "IntegralUndefined",
    "IntegratorConfig",
    "ModelParams",
    "ParameterError",
    "ParticleState",
    "SflockError",
    "SingularityError",
    "SingularityStall",
    "StepResult",
    "TerminalStatus",
    "Theorem3Report",
    "TrajectoryRecord",
    "UnsupportedError",
    "WeightFunction",
    "WeightKind",
    "admissible_c2",
    "auto_select_group",
    "beta_distance",
    "check_axioms",
    "classify_flocking",
    "classify_regime",
    "coupling_eval",
    "deviations",
    "dissipation_check",
    "eqmot_check",
    "flocking_condition",
    "group_fluctuations",
    "kernel_backend",
    "lyapunov",
    "make_coupling",
    "make_weight",
    "min_pair_distance",
    "momeq_check",
    "moments",
    "oracle_integrate",
    "regime_sequence",
    "rhs",
    "simulate",
    "step_adaptive",
    "theorem2_check",
    "theorem3_check",
    "weight_eval",
    "weight_primitive",
]
