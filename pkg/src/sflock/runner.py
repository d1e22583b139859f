"""Experiment execution: simulate, run checks, write artifacts.

Outputs per run directory:

* ``config.ini`` -- the materialized configuration (round-trips through the
  parser);
* ``trajectory.csv`` -- ``t`` then positions then velocities, agent-major,
  component-minor, serialized with 17 significant digits so states parse back
  bit-exactly;
* ``diagnostics.csv`` -- per-sample observables;
* ``bounds_<id>.csv`` -- residual series per requested check;
* ``summary.json`` -- run metadata, events, and check verdicts;
* ``sigma_v.svg`` / ``min_dist.svg`` -- optional convenience plots.

Exit codes: 0 completed with all checks passing, 1 configuration error,
2 check failure, 3 aborted (unresolvable near-collision or step budget).
"""

from __future__ import annotations

import json
import sys
import time
from pathlib import Path

import numpy as np

from .config import (
    ExperimentConfig,
    RNG_ALGORITHM,
    generate_initial,
    load_config,
    render_config,
)
from .diagnostics import default_s_ref, frame_beta_exponent
from .errors import ConfigError, SflockError
from .guards import (
    CollisionGroup,
    auto_select_group,
    dissipation_check,
    eqmot_check,
    momeq_check,
    theorem2_check,
    theorem3_check,
)
from .integrator import TerminalStatus, TrajectoryRecord, simulate
from .params import ModelParams
from .state import ParticleState
from .weights import make_weight

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_CHECK_FAILED = 2
EXIT_ABORTED = 3


def trajectory_header(n: int, d: int) -> list:
    cols = ["t"]
    cols += [f"x{i}_{k}" for i in range(n) for k in range(d)]
    cols += [f"v{i}_{k}" for i in range(n) for k in range(d)]
    return cols


def write_trajectory_csv(path, record: TrajectoryRecord) -> None:
    first = record.samples[0].state
    n, d = first.n_agents, first.dim
    with open(path, "w") as fh:
        fh.write(",".join(trajectory_header(n, d)) + "\n")
        for s in record.samples:
            vals = [s.time]
            vals += list(s.state.positions.ravel())
            vals += list(s.state.velocities.ravel())
            fh.write(",".join(f"{v:.17g}" for v in vals) + "\n")


def read_trajectory_csv(path, n: int, d: int):
    """Parse a trajectory written by :func:`write_trajectory_csv`."""
    states = []
    with open(path) as fh:
        header = fh.readline().strip().split(",")
        expected = trajectory_header(n, d)
        if header != expected:
            raise ConfigError("trajectory", f"unexpected columns in {path}")
        for line in fh:
            vals = np.array([float(v) for v in line.split(",")])
            t = vals[0]
            pos = vals[1 : 1 + n * d].reshape(n, d)
            vel = vals[1 + n * d :].reshape(n, d)
            states.append(ParticleState(t, pos, vel))
    return states


def write_diagnostics_csv(path, record: TrajectoryRecord) -> None:
    with open(path, "w") as fh:
        fh.write("t,m2,sigma_x,sigma_v,min_dist,l_beta,E_plus,E_minus\n")
        for s in record.samples:
            f = s.frame
            row = (
                s.time,
                f.m2,
                f.sigma_x,
                f.sigma_v,
                f.min_dist,
                f.l_beta,
                f.lyapunov_plus,
                f.lyapunov_minus,
            )
            fh.write(",".join(f"{v:.17g}" for v in row) + "\n")


def _render_event(ev) -> dict:
    out = {"kind": ev.kind, "time": ev.time}
    if ev.kind == "near_collision":
        out["pair"] = list(ev.pair)
        out["distance"] = ev.distance
    elif ev.kind == "step_rejected":
        out["reason"] = ev.reason
    return out


def resolve_group(cfg: ExperimentConfig, record: TrajectoryRecord):
    if cfg.group == "none":
        return None
    if cfg.group == "auto":
        return auto_select_group(record, cfg.integrator.proximity_fraction)
    group = CollisionGroup(cfg.group)
    group.validate_for(cfg.model.n_agents)
    return group


def run_checks(cfg: ExperimentConfig, record: TrajectoryRecord, group) -> list:
    """Execute the configured checks; returns their summary dicts (with reports)."""
    results = []
    for check_id in cfg.checks:
        if check_id in ("Es1", "Es2"):
            report = theorem2_check(record, cfg.model)
            summary = report.summary()
        elif check_id in ("Es3", "Es4"):
            t3 = theorem3_check(
                record,
                make_weight(cfg.model),
                cfg.theorem3_beta,
                cfg.theorem3_big_c,
                cfg.model,
            )
            report = t3.bound
            summary = t3.summary()
        elif check_id in ("In1", "In2"):
            report = dissipation_check(record, group, cfg.model)
            summary = report.summary()
        elif check_id == "EqMot":
            report = eqmot_check(record, group)
            summary = report.summary()
        else:  # MomEq
            report = momeq_check(record, cfg.model)
            summary = report.summary()
        if report.inequality_id != check_id:
            raise ConfigError(
                "checks",
                f"requested {check_id} but the parameters select "
                f"{report.inequality_id}",
            )
        results.append((check_id, report, summary))
    return results


def run_experiment(config, out_dir=None) -> int:
    """Run one experiment end to end; returns the process exit code.

    ``config`` is an ExperimentConfig or a path to a config file. Human
    diagnostics go to stderr; artifacts into ``out_dir`` (default: the
    config's label or ``run`` under the current directory).
    """
    t_start = time.perf_counter()
    try:
        cfg = config if isinstance(config, ExperimentConfig) else load_config(config)
    except (ConfigError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        initial = generate_initial(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    out = Path(out_dir) if out_dir is not None else Path(cfg.label or "run")
    out.mkdir(parents=True, exist_ok=True)
    (out / "config.ini").write_text(render_config(cfg))

    s_ref = cfg.s_ref if cfg.s_ref is not None else default_s_ref(initial, cfg.model)
    record = simulate(
        initial,
        cfg.model,
        cfg.integrator,
        t_final=cfg.t_final,
        sample_every=cfg.sample_every,
        c2=cfg.c2_value,
        s_ref=s_ref,
    )

    write_trajectory_csv(out / "trajectory.csv", record)
    write_diagnostics_csv(out / "diagnostics.csv", record)

    if cfg.plots:
        from .svgplot import write_line_svg

        times = record.times
        sv = record.frame_series("sigma_v")
        md = record.frame_series("min_dist")
        write_line_svg(
            out / "sigma_v.svg", times, sv, "velocity spread", "t", "sigma_v",
            logy=bool((sv > 0).all()),
        )
        write_line_svg(out / "min_dist.svg", times, md, "minimum gap", "t", "min_dist")

    check_results = []
    checks_pass = True
    if record.completed and cfg.checks:
        try:
            group = resolve_group(cfg, record)
            check_results = run_checks(cfg, record, group)
        except (ConfigError, SflockError) as exc:
            print(f"config error: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        for check_id, report, _ in check_results:
            report.to_csv(out / f"bounds_{check_id}.csv")
            checks_pass &= report.passed
    else:
        group = None

    summary = {
        "label": cfg.label,
        "seed": cfg.seed,
        "rng": RNG_ALGORITHM,
        "kernel_backend": _backend_name(),
        "params": _params_dict(cfg.model),
        "integrator": {
            "rel_tol": cfg.integrator.rel_tol,
            "abs_tol": cfg.integrator.abs_tol,
            "dt_init": cfg.integrator.dt_init,
            "dt_min": cfg.integrator.dt_min,
            "dt_max": cfg.integrator.dt_max,
            "proximity_fraction": cfg.integrator.proximity_fraction,
            "max_steps": cfg.integrator.max_steps,
        },
        "run": {
            "t_final": cfg.t_final,
            "sample_every": cfg.sample_every,
            "c2": cfg.c2_value,
            "s_ref": s_ref,
            "l_beta_exponent": frame_beta_exponent(cfg.model),
        },
        "group": list(group.members) if group is not None else None,
        "terminal_status": record.terminal_status.value,
        "n_samples": len(record.samples),
        "runtime_sec": time.perf_counter() - t_start,
        "events": _event_summary(record.events),
        "checks": [summary for _, _, summary in check_results],
        "all_checks_pass": bool(checks_pass),
    }
    with open(out / "summary.json", "w") as fh:
        json.dump(summary, fh, indent=2)

    if not record.completed:
        print(
            f"{cfg.label or 'run'}: {record.terminal_status.value} at "
            f"t={record.samples[-1].time:.6g}",
            file=sys.stderr,
        )
        return EXIT_ABORTED
    if not checks_pass:
        failed = [cid for cid, rep, _ in check_results if not rep.passed]
        print(f"{cfg.label or 'run'}: checks failed: {', '.join(failed)}", file=sys.stderr)
        return EXIT_CHECK_FAILED
    return EXIT_OK


def _event_summary(events) -> dict:
    counts = {}
    for ev in events:
        counts[ev.kind] = counts.get(ev.kind, 0) + 1
    return {"counts": counts, "first": [_render_event(e) for e in events[:10]]}


def _params_dict(m: ModelParams) -> dict:
    return {
        "n_agents": m.n_agents,
        "dim": m.dim,
        "alpha": m.alpha,
        "gamma": m.gamma,
        "delta": m.delta,
        "c1": m.c1,
        "weight_kind": m.weight_kind.value,
        "coupling_kind": m.coupling_kind.value,
        "beta_cs": m.beta_cs,
        "compensated_sum": m.compensated_sum,
    }


def _backend_name() -> str:
    from . import kernels

    return kernels.backend()


def check_trajectory(
    traj_path,
    config_path,
    check_ids,
    group_override=None,
    beta=None,
    big_c=None,
    out_dir=None,
) -> int:
    """Re-run inequality checks against a stored trajectory.csv."""
    try:
        cfg = load_config(config_path)
        overrides = {}
        if group_override is not None:
            overrides["group"] = group_override
        if beta is not None:
            overrides["theorem3_beta"] = beta
        if big_c is not None:
            overrides["theorem3_big_c"] = big_c
        if check_ids:
            overrides["checks"] = tuple(check_ids)
        if overrides:
            from dataclasses import replace

            cfg = replace(cfg, **overrides)
        states = read_trajectory_csv(traj_path, cfg.model.n_agents, cfg.model.dim)
    except (ConfigError, OSError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    record = TrajectoryRecord.from_states(states)
    try:
        group = resolve_group(cfg, record)
        results = run_checks(cfg, record, group)
    except (ConfigError, SflockError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    all_pass = True
    out = Path(out_dir) if out_dir is not None else None
    for check_id, report, summary in results:
        if out is not None:
            out.mkdir(parents=True, exist_ok=True)
            report.to_csv(out / f"bounds_{check_id}.csv")
        print(json.dumps(summary, indent=2))
        all_pass &= report.passed
    return EXIT_OK if all_pass else EXIT_CHECK_FAILED
