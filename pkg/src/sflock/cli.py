"""Command-line interface.

Subcommands::

    sflock presets                     list shipped experiments
    sflock preset NAME... [--out DIR]  run presets (use --jobs for parallel runs)
    sflock run CONFIG [--out DIR]      run an experiment from a config file
    sflock check TRAJ --config CFG --ineq ID [...]
                                       re-check inequalities on a stored trajectory

SFLOCK_THREADS caps the number of parallel preset runs.
"""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .presets import get_preset, list_presets, preset_names
from .runner import EXIT_CONFIG, check_trajectory, run_experiment


def _thread_cap() -> int:
    env = os.environ.get("SFLOCK_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return os.cpu_count() or 1


def _run_preset(args) -> int:
    name, out_root = args
    cfg = get_preset(name)
    return run_experiment(cfg, Path(out_root) / name)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="sflock",
        description="alignment-dynamics simulator with singular weights and bound monitors",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("presets", help="list shipped experiments")

    p_preset = sub.add_parser("preset", help="run one or more shipped experiments")
    p_preset.add_argument("names", nargs="+", metavar="NAME")
    p_preset.add_argument("--out", default="out", help="output root directory")
    p_preset.add_argument("--jobs", type=int, default=1, help="parallel preset runs")

    p_run = sub.add_parser("run", help="run an experiment from a config file")
    p_run.add_argument("config")
    p_run.add_argument("--out", default=None, help="output directory")

    p_check = sub.add_parser("check", help="re-check inequalities on a trajectory.csv")
    p_check.add_argument("trajectory")
    p_check.add_argument("--config", required=True, help="config file of the run")
    p_check.add_argument(
        "--ineq", action="append", required=True, metavar="ID",
        help="inequality id (repeatable): In1 In2 Es1 Es2 Es3 Es4 MomEq EqMot",
    )
    p_check.add_argument("--group", default=None, help="'auto' or comma-separated indices")
    p_check.add_argument("--beta", type=float, default=None)
    p_check.add_argument("--big-c", type=float, default=None)
    p_check.add_argument("--c2", type=float, default=None, help="unused by checks; accepted for symmetry")
    p_check.add_argument("--out", default=None, help="directory for bounds CSVs")

    args = parser.parse_args(argv)

    if args.command == "presets":
        print(list_presets())
        return 0

    if args.command == "preset":
        for name in args.names:
            if name not in preset_names():
                print(f"config error: unknown preset {name!r}", file=sys.stderr)
                return EXIT_CONFIG
        jobs = min(args.jobs, _thread_cap(), len(args.names))
        if jobs <= 1:
            codes = [_run_preset((n, args.out)) for n in args.names]
        else:
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                codes = list(pool.map(_run_preset, [(n, args.out) for n in args.names]))
        for name, code in zip(args.names, codes):
            print(f"{name}: exit {code}")
        return max(codes)

    if args.command == "run":
        return run_experiment(args.config, args.out)

    group = None
    if args.group is not None:
        group = args.group if args.group in ("auto", "none") else tuple(
            int(x) for x in args.group.split(",")
        )
    return check_trajectory(
        args.trajectory,
        args.config,
        args.ineq,
        group_override=group,
        beta=args.beta,
        big_c=args.big_c,
        out_dir=args.out,
    )


if __name__ == "__main__":
    sys.exit(main())
