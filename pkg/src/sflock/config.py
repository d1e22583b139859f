"""Experiment configuration: flat key/value files with dotted sections.

The format is one ``key = value`` pair per line, ``#`` comments, keys like
``model.alpha``. It is deliberately flat so configs diff cleanly::

    model.n_agents = 8
    model.alpha = 1.0
    integrator.rel_tol = 1e-10
    run.t_final = 20.0
    initial.kind = uniform_box
    initial.extent = 3.0
    checks = MomEq, EqMot
    group = auto

Initial conditions are produced by a seeded generator (numpy's PCG64; the
algorithm identifier is recorded in summary.json so the corpus can be
regenerated elsewhere).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .errors import ConfigError, ParameterError
from .integrator import IntegratorConfig
from .params import CouplingKind, ModelParams, WeightKind
from .state import ParticleState

RNG_ALGORITHM = "numpy-pcg64"

INITIAL_KINDS = ("explicit_list", "uniform_box", "head_on_pair", "lattice_perturbed")
CHECK_IDS = ("In1", "In2", "Es1", "Es2", "Es3", "Es4", "MomEq", "EqMot")
GROUP_CHECKS = ("In1", "In2", "EqMot")


@dataclass(frozen=True)
class InitialSpec:
    kind: str = "uniform_box"
    extent: float = 2.0
    speed_scale: float = 0.5
    gap: float = 1.0
    speed: float = 0.5
    spacing: float = 1.0
    jitter: float = 0.1
    positions: Optional[list] = None
    velocities: Optional[list] = None


@dataclass(frozen=True)
class ExperimentConfig:
    model: ModelParams
    integrator: IntegratorConfig = field(default_factory=IntegratorConfig)
    initial: InitialSpec = field(default_factory=InitialSpec)
    t_final: float = 10.0
    sample_every: float = 0.1
    seed: int = 0
    c2_value: float = 1.0
    s_ref: Optional[float] = None
    checks: tuple = ()
    group: object = "auto"  # "auto", "none", or a tuple of indices
    theorem3_beta: Optional[float] = None
    theorem3_big_c: Optional[float] = None
    plots: bool = True
    label: str = ""

    def __post_init__(self):
        if not self.t_final > 0:
            raise ConfigError("run.t_final", "must be > 0")
        if not 0 < self.sample_every <= self.t_final:
            raise ConfigError("run.sample_every", "must lie in (0, t_final]")
        if self.c2_value <= 0:
            raise ConfigError("run.c2", "must be > 0")
        for c in self.checks:
            if c not in CHECK_IDS:
                raise ConfigError("checks", f"unknown inequality id {c!r}")
        if self.initial.kind not in INITIAL_KINDS:
            raise ConfigError("initial.kind", f"unknown kind {self.initial.kind!r}")
        g, a = self.model.gamma, self.model.alpha
        if "Es1" in self.checks and a != 2.0 * g:
            raise ConfigError("checks", "Es1 needs alpha = 2 gamma")
        if "Es2" in self.checks and not a > 2.0 * g:
            raise ConfigError("checks", "Es2 needs alpha > 2 gamma")
        if "In1" in self.checks and g >= 1.0:
            raise ConfigError("checks", "In1 applies to gamma < 1")
        if "In2" in self.checks and g < 1.0:
            raise ConfigError("checks", "In2 applies to gamma >= 1")
        if ("Es3" in self.checks or "Es4" in self.checks):
            if self.theorem3_beta is None or self.theorem3_big_c is None:
                raise ConfigError(
                    "theorem3.beta", "Es3/Es4 need theorem3.beta and theorem3.big_c"
                )
            if "Es3" in self.checks and not self.theorem3_beta > 0:
                raise ConfigError("theorem3.beta", "Es3 needs beta > 0")
            if "Es4" in self.checks and self.theorem3_beta != 0:
                raise ConfigError("theorem3.beta", "Es4 needs beta = 0")
        if self.group == "none" and any(c in GROUP_CHECKS for c in self.checks):
            raise ConfigError("group", "In1/In2/EqMot checks need a group")


# ----------------------------------------------------------------------------
# parsing


def _parse_pairs(text: str) -> dict:
    pairs = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}", f"expected 'key = value', got {raw!r}")
        key, value = line.split("=", 1)
        key = key.strip()
        if key in pairs:
            raise ConfigError(key, "duplicate key")
        pairs[key] = value.strip()
    return pairs


def _take_float(pairs, key, default=None):
    if key not in pairs:
        if default is None:
            raise ConfigError(key, "missing required key")
        return default
    raw = pairs.pop(key)
    try:
        return float(raw)
    except ValueError:
        raise ConfigError(key, f"expected a number, got {raw!r}") from None


def _take_int(pairs, key, default=None):
    if key not in pairs:
        if default is None:
            raise ConfigError(key, "missing required key")
        return default
    raw = pairs.pop(key)
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(key, f"expected an integer, got {raw!r}") from None


def _take_bool(pairs, key, default):
    if key not in pairs:
        return default
    raw = pairs.pop(key).lower()
    if raw in ("true", "yes", "1"):
        return True
    if raw in ("false", "no", "0"):
        return False
    raise ConfigError(key, f"expected true/false, got {raw!r}")


def _take_str(pairs, key, default=None):
    if key not in pairs:
        if default is None:
            raise ConfigError(key, "missing required key")
        return default
    return pairs.pop(key)


def parse_config(text: str) -> ExperimentConfig:
    """Parse a config file's text; raises ConfigError naming the bad field."""
    pairs = _parse_pairs(text)

    try:
        model = ModelParams(
            n_agents=_take_int(pairs, "model.n_agents"),
            dim=_take_int(pairs, "model.dim", 2),
            alpha=_take_float(pairs, "model.alpha", 1.0),
            gamma=_take_float(pairs, "model.gamma", 1.0),
            delta=_take_float(pairs, "model.delta", 0.0),
            c1=_take_float(pairs, "model.c1", 1.0),
            weight_kind=WeightKind(_take_str(pairs, "model.weight_kind", "power_singular")),
            coupling_kind=CouplingKind(_take_str(pairs, "model.coupling_kind", "power_law")),
            beta_cs=_take_float(pairs, "model.beta_cs", 0.0),
            compensated_sum=_take_bool(pairs, "model.compensated_sum", False),
        )
    except ValueError as exc:
        raise ConfigError("model.weight_kind", str(exc)) from None
    except ParameterError as exc:
        raise ConfigError("model", str(exc)) from None

    try:
        dt_min_raw = pairs.pop("integrator.dt_min", None)
        integ = IntegratorConfig(
            rel_tol=_take_float(pairs, "integrator.rel_tol", 1e-8),
            abs_tol=_take_float(pairs, "integrator.abs_tol", 1e-10),
            dt_init=_take_float(pairs, "integrator.dt_init", 1e-3),
            dt_min=float(dt_min_raw) if dt_min_raw is not None else None,
            dt_max=_take_float(pairs, "integrator.dt_max", 1.0),
            proximity_fraction=_take_float(pairs, "integrator.proximity_fraction", 0.2),
            max_steps=_take_int(pairs, "integrator.max_steps", 1_000_000),
        )
    except (ParameterError, ValueError) as exc:
        raise ConfigError("integrator", str(exc)) from None

    init_kwargs = {"kind": _take_str(pairs, "initial.kind", "uniform_box")}
    for name in ("extent", "speed_scale", "gap", "speed", "spacing", "jitter"):
        key = f"initial.{name}"
        if key in pairs:
            init_kwargs[name] = _take_float(pairs, key)
    for name in ("positions", "velocities"):
        key = f"initial.{name}"
        if key in pairs:
            try:
                init_kwargs[name] = json.loads(pairs.pop(key))
            except json.JSONDecodeError as exc:
                raise ConfigError(key, f"bad JSON array: {exc}") from None
    initial = InitialSpec(**init_kwargs)

    checks_raw = pairs.pop("checks", "")
    checks = tuple(c.strip() for c in checks_raw.split(",") if c.strip())

    group_raw = pairs.pop("group", "auto").strip()
    if group_raw in ("auto", "none"):
        group = group_raw
    else:
        try:
            group = tuple(int(x) for x in group_raw.split(","))
        except ValueError:
            raise ConfigError("group", f"expected 'auto', 'none' or indices, got {group_raw!r}") from None

    s_ref_raw = pairs.pop("run.s_ref", None)

    cfg = ExperimentConfig(
        model=model,
        integrator=integ,
        initial=initial,
        t_final=_take_float(pairs, "run.t_final"),
        sample_every=_take_float(pairs, "run.sample_every"),
        seed=_take_int(pairs, "run.seed", 0),
        c2_value=_take_float(pairs, "run.c2", 1.0),
        s_ref=float(s_ref_raw) if s_ref_raw is not None else None,
        checks=checks,
        group=group,
        theorem3_beta=(
            _take_float(pairs, "theorem3.beta") if "theorem3.beta" in pairs else None
        ),
        theorem3_big_c=(
            _take_float(pairs, "theorem3.big_c") if "theorem3.big_c" in pairs else None
        ),
        plots=_take_bool(pairs, "run.plots", True),
        label=pairs.pop("label", ""),
    )
    if pairs:
        raise ConfigError(next(iter(pairs)), "unknown key")
    return cfg


def load_config(path) -> ExperimentConfig:
    with open(path) as fh:
        return parse_config(fh.read())


def render_config(cfg: ExperimentConfig) -> str:
    """Serialize back to the flat format; parse(render(cfg)) round-trips."""
    lines = []
    if cfg.label:
        lines.append(f"label = {cfg.label}")
    m = cfg.model
    lines += [
        f"model.n_agents = {m.n_agents}",
        f"model.dim = {m.dim}",
        f"model.alpha = {m.alpha!r}",
        f"model.gamma = {m.gamma!r}",
        f"model.delta = {m.delta!r}",
        f"model.c1 = {m.c1!r}",
        f"model.weight_kind = {m.weight_kind.value}",
        f"model.coupling_kind = {m.coupling_kind.value}",
        f"model.beta_cs = {m.beta_cs!r}",
        f"model.compensated_sum = {str(m.compensated_sum).lower()}",
    ]
    it = cfg.integrator
    lines += [
        f"integrator.rel_tol = {it.rel_tol!r}",
        f"integrator.abs_tol = {it.abs_tol!r}",
        f"integrator.dt_init = {it.dt_init!r}",
        f"integrator.dt_max = {it.dt_max!r}",
        f"integrator.proximity_fraction = {it.proximity_fraction!r}",
        f"integrator.max_steps = {it.max_steps}",
    ]
    if it.dt_min is not None:
        lines.append(f"integrator.dt_min = {it.dt_min!r}")
    lines += [
        f"run.t_final = {cfg.t_final!r}",
        f"run.sample_every = {cfg.sample_every!r}",
        f"run.seed = {cfg.seed}",
        f"run.c2 = {cfg.c2_value!r}",
        f"run.plots = {str(cfg.plots).lower()}",
    ]
    if cfg.s_ref is not None:
        lines.append(f"run.s_ref = {cfg.s_ref!r}")
    ini = cfg.initial
    lines.append(f"initial.kind = {ini.kind}")
    if ini.kind == "uniform_box":
        lines += [f"initial.extent = {ini.extent!r}", f"initial.speed_scale = {ini.speed_scale!r}"]
    elif ini.kind == "head_on_pair":
        lines += [f"initial.gap = {ini.gap!r}", f"initial.speed = {ini.speed!r}"]
    elif ini.kind == "lattice_perturbed":
        lines += [
            f"initial.spacing = {ini.spacing!r}",
            f"initial.jitter = {ini.jitter!r}",
            f"initial.speed_scale = {ini.speed_scale!r}",
        ]
    elif ini.kind == "explicit_list":
        lines += [
            f"initial.positions = {json.dumps(ini.positions)}",
            f"initial.velocities = {json.dumps(ini.velocities)}",
        ]
    if cfg.checks:
        lines.append("checks = " + ", ".join(cfg.checks))
    if isinstance(cfg.group, tuple):
        lines.append("group = " + ",".join(str(i) for i in cfg.group))
    else:
        lines.append(f"group = {cfg.group}")
    if cfg.theorem3_beta is not None:
        lines.append(f"theorem3.beta = {cfg.theorem3_beta!r}")
    if cfg.theorem3_big_c is not None:
        lines.append(f"theorem3.big_c = {cfg.theorem3_big_c!r}")
    return "\n".join(lines) + "\n"


# ----------------------------------------------------------------------------
# initial conditions


def generate_initial(cfg: ExperimentConfig) -> ParticleState:
    """Build the seeded initial state and validate its gaps."""
    m = cfg.model
    ini = cfg.initial
    rng = np.random.default_rng(cfg.seed)
    if ini.kind == "explicit_list":
        if ini.positions is None or ini.velocities is None:
            raise ConfigError("initial.positions", "explicit_list needs positions and velocities")
        pos = np.asarray(ini.positions, dtype=np.float64)
        vel = np.asarray(ini.velocities, dtype=np.float64)
    elif ini.kind == "uniform_box":
        pos = rng.uniform(0.0, ini.extent, (m.n_agents, m.dim))
        vel = rng.uniform(-ini.speed_scale, ini.speed_scale, (m.n_agents, m.dim))
    elif ini.kind == "head_on_pair":
        if m.n_agents != 2:
            raise ConfigError("initial.kind", "head_on_pair needs model.n_agents = 2")
        pos = np.zeros((2, m.dim))
        vel = np.zeros((2, m.dim))
        pos[0, 0], pos[1, 0] = -ini.gap / 2.0, ini.gap / 2.0
        vel[0, 0], vel[1, 0] = ini.speed, -ini.speed
    else:  # lattice_perturbed
        side = math.ceil(m.n_agents ** (1.0 / m.dim))
        sites = []
        idx = [0] * m.dim
        while len(sites) < m.n_agents:
            sites.append([ini.spacing * k for k in idx])
            for axis in range(m.dim):
                idx[axis] += 1
                if idx[axis] < side:
                    break
                idx[axis] = 0
        pos = np.asarray(sites, dtype=np.float64)
        pos += rng.uniform(-ini.jitter, ini.jitter, pos.shape)
        vel = rng.uniform(-ini.speed_scale, ini.speed_scale, pos.shape)
    try:
        state = ParticleState(0.0, pos, vel)
    except ParameterError as exc:
        raise ConfigError("initial", str(exc)) from None
    if state.n_agents != m.n_agents or state.dim != m.dim:
        raise ConfigError(
            "initial", f"generated shape {state.positions.shape} does not match model"
        )
    from . import kernels

    dmin, i, j = kernels.min_pair(state.positions)
    if dmin <= m.delta:
        raise ConfigError(
            "initial", f"pair ({i}, {j}) starts at gap {dmin:.3e} <= delta = {m.delta}"
        )
    return state


def with_output(cfg: ExperimentConfig, **kwargs) -> ExperimentConfig:
    return replace(cfg, **kwargs)
