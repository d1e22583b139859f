"""Shipped experiments covering the regimes the library verifies.

Each preset is a complete ExperimentConfig plus a one-line note on the claim
it exercises. Parameter choices are calibrated so every configured check
passes at its stated tolerance on the recorded seed; the finite-time preset
ends shortly after alignment because the sub-linear coupling makes the
post-alignment dynamics stiff for an explicit stepper.
"""

from __future__ import annotations

from .config import ExperimentConfig, InitialSpec
from .errors import ConfigError
from .integrator import IntegratorConfig
from .params import ModelParams, WeightKind

SEED = 20260810


def _flock_linear():
    return ExperimentConfig(
        label="flock-linear",
        model=ModelParams(n_agents=8, dim=2, alpha=1.0, gamma=1.0),
        integrator=IntegratorConfig(rel_tol=1e-10, abs_tol=1e-12, dt_max=0.1),
        initial=InitialSpec(kind="uniform_box", extent=3.0, speed_scale=0.5),
        t_final=20.0,
        sample_every=0.1,
        seed=SEED,
        checks=("MomEq", "EqMot"),
        group="auto",
    )


def _flock_finite_time():
    return ExperimentConfig(
        label="flock-finite-time",
        model=ModelParams(n_agents=8, dim=2, alpha=1.0, gamma=0.75),
        integrator=IntegratorConfig(rel_tol=1e-10, abs_tol=1e-13, dt_max=0.1),
        initial=InitialSpec(kind="uniform_box", extent=1.5, speed_scale=0.5),
        t_final=1.35,
        sample_every=0.0075,
        seed=SEED,
        checks=(),
        group="none",
    )


def _flock_algebraic():
    return ExperimentConfig(
        label="flock-algebraic",
        model=ModelParams(n_agents=8, dim=2, alpha=1.0, gamma=1.25),
        integrator=IntegratorConfig(rel_tol=1e-10, abs_tol=1e-12, dt_max=0.25),
        initial=InitialSpec(kind="uniform_box", extent=3.0, speed_scale=0.5),
        t_final=100.0,
        sample_every=0.25,
        seed=SEED,
        checks=("MomEq", "EqMot"),
        group="auto",
    )


def _collision_test(gamma: float, label: str):
    return ExperimentConfig(
        label=label,
        model=ModelParams(n_agents=2, dim=1, alpha=1.0, gamma=gamma),
        integrator=IntegratorConfig(rel_tol=1e-10, abs_tol=1e-12, dt_max=0.05),
        initial=InitialSpec(kind="head_on_pair", gap=1.0, speed=0.45),
        t_final=10.0,
        sample_every=0.01,
        seed=SEED,
        checks=("In2", "EqMot", "MomEq"),
        group=(0, 1),
    )


def _subcritical_contrast():
    return ExperimentConfig(
        label="subcritical-contrast",
        model=ModelParams(n_agents=2, dim=1, alpha=0.25, gamma=1.0),
        integrator=IntegratorConfig(rel_tol=1e-10, abs_tol=1e-12, dt_max=0.05),
        initial=InitialSpec(kind="head_on_pair", gap=1.0, speed=1.5),
        t_final=10.0,
        sample_every=0.01,
        seed=SEED,
        checks=(),
        group="none",
    )


def _theorem2(alpha: float, label: str, checks):
    return ExperimentConfig(
        label=label,
        model=ModelParams(n_agents=6, dim=2, alpha=alpha, gamma=1.0),
        integrator=IntegratorConfig(rel_tol=1e-8, abs_tol=1e-10, dt_max=0.05),
        initial=InitialSpec(kind="uniform_box", extent=2.0, speed_scale=0.5),
        t_final=5.0,
        sample_every=0.001,
        seed=SEED,
        checks=checks,
        group="auto",
    )


def _theorem3_custom():
    # psi(s) = s^-3 with gamma = 1: the primitive grows like s^-2 / 2 at the
    # origin, and the growth condition psi <= C |Psi|^(2 (1 - beta)) holds with
    # beta = 1/4 for any C >= 2 sqrt(2); C = 3 leaves a margin.
    return ExperimentConfig(
        label="theorem3-custom",
        model=ModelParams(n_agents=6, dim=2, alpha=3.0, gamma=1.0),
        integrator=IntegratorConfig(rel_tol=1e-8, abs_tol=1e-10, dt_max=0.05),
        initial=InitialSpec(kind="uniform_box", extent=2.0, speed_scale=0.5),
        t_final=5.0,
        sample_every=0.001,
        seed=SEED,
        checks=("Es3", "EqMot"),
        group="auto",
        theorem3_beta=0.25,
        theorem3_big_c=3.0,
    )


def _group_dissipation():
    return ExperimentConfig(
        label="group-dissipation",
        model=ModelParams(n_agents=6, dim=2, alpha=1.0, gamma=1.0),
        integrator=IntegratorConfig(rel_tol=1e-8, abs_tol=1e-10, dt_max=0.05),
        initial=InitialSpec(kind="uniform_box", extent=2.0, speed_scale=0.5),
        t_final=5.0,
        sample_every=0.001,
        seed=SEED,
        checks=("In2", "EqMot", "MomEq"),
        group=(0, 1, 2),
    )


_PRESETS = {
    "flock-linear": (
        _flock_linear,
        "velocity spread decays exponentially for the unit-exponent coupling",
    ),
    "flock-finite-time": (
        _flock_finite_time,
        "sub-linear coupling (gamma = 0.75) aligns in finite time",
    ),
    "flock-algebraic": (
        _flock_algebraic,
        "super-linear coupling (gamma = 1.25) aligns at an algebraic rate",
    ),
    "collision-test": (
        lambda: _collision_test(1.0, "collision-test"),
        "head-on pair with a singular weight never collides (gamma = 1)",
    ),
    "collision-test-nl": (
        lambda: _collision_test(1.25, "collision-test-nl"),
        "head-on pair never collides with the nonlinear coupling (gamma = 1.25)",
    ),
    "subcritical-contrast": (
        _subcritical_contrast,
        "integrable weight (alpha = 0.25) lets the pair collide; the run aborts",
    ),
    "theorem2-es1": (
        lambda: _theorem2(2.0, "theorem2-es1", ("Es1", "EqMot")),
        "log gap functional plus kinetic term grows at most linearly (alpha = 2 gamma)",
    ),
    "theorem2-es2": (
        lambda: _theorem2(3.0, "theorem2-es2", ("Es2", "EqMot")),
        "power gap functional plus kinetic term grows at most linearly (alpha > 2 gamma)",
    ),
    "theorem3-custom": (
        _theorem3_custom,
        "primitive-based gap functional bound under the sampled growth condition",
    ),
    "group-dissipation": (
        _group_dissipation,
        "group fluctuation dissipation inequality on a seeded three-agent group",
    ),
}


def preset_names():
    return tuple(_PRESETS)


def get_preset(name: str) -> ExperimentConfig:
    if name not in _PRESETS:
        raise ConfigError("preset", f"unknown preset {name!r}; see 'sflock presets'")
    return _PRESETS[name][0]()


def list_presets() -> str:
    """Human-readable table of presets, their parameters, and their claims."""
    rows = []
    for name, (factory, note) in _PRESETS.items():
        cfg = factory()
        m = cfg.model
        kind = m.weight_kind.value
        rows.append(
            (
                name,
                f"N={m.n_agents} d={m.dim} alpha={m.alpha:g} gamma={m.gamma:g} "
                f"{kind} T={cfg.t_final:g}",
                note,
            )
        )
    w0 = max(len(r[0]) for r in rows)
    w1 = max(len(r[1]) for r in rows)
    lines = [f"{'preset':<{w0}}  {'parameters':<{w1}}  claim exercised"]
    lines.append("-" * len(lines[0]))
    for r in rows:
        lines.append(f"{r[0]:<{w0}}  {r[1]:<{w1}}  {r[2]}")
    return "\n".join(lines)
