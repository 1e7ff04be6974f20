"""Command-line entry point: ``sparsethresh {run,sweep,check,gen}``.

Exit status is 0 on success, 2 for an invalid config and 1 for runtime
failures (including failed checks).
"""
import argparse
import dataclasses
import sys
from pathlib import Path

from .harness import (
    ConfigError,
    ExperimentConfig,
    SweepConfig,
    load_config,
    make_problem,
    run_experiment,
    run_sweep,
    save_instance,
)
from .solvers import ALGORITHMS


def _build_parser():
    parser = argparse.ArgumentParser(prog="sparsethresh",
                                     description="Sparse recovery by hard and natural thresholding.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, config_required=True):
        p.add_argument("--config", required=config_required, help="path to a JSON config")
        p.add_argument("--seed", type=int, help="override the problem and solver base seed")
        p.add_argument("--out", help="output directory (overrides run.out_dir)")
        p.add_argument("--algorithm", choices=ALGORITHMS, help="override solver.algorithm")

    common(sub.add_parser("run", help="run one experiment and write per-trial traces"))
    common(sub.add_parser("sweep", help="run a parameter grid and write success rates"))
    common(sub.add_parser("gen", help="write the generated problem instances as JSON"))
    check = sub.add_parser("check", help="run the built-in diagnostic checks")
    check.add_argument("--seed", type=int, default=0)
    return parser


def _override(cfg, args):
    if isinstance(cfg, SweepConfig):
        base = _override(cfg.base, args)
        grid = dict(cfg.grid)
        if args.algorithm:
            grid.pop("algorithm", None)
        return SweepConfig(base, grid)
    problem, solver = cfg.problem, cfg.solver
    if args.seed is not None:
        problem = dataclasses.replace(problem, seed=args.seed)
        solver = dataclasses.replace(solver, seed=args.seed)
    if args.algorithm:
        solver = dataclasses.replace(solver, algorithm=args.algorithm)
    out = ExperimentConfig(problem, solver, cfg.run)
    out.validate()
    return out


def main(argv=None):
    args = _build_parser().parse_args(argv)
    if args.command == "check":
        from .checks import run_checks
        results = run_checks(args.seed)
        for name, passed, detail in results:
            print(f"{'PASS' if passed else 'FAIL'}  {name}: {detail}")
        return 0 if all(p for _, p, _ in results) else 1

    try:
        cfg = _override(load_config(args.config, sweep=args.command == "sweep"), args)
    except (ConfigError, FileNotFoundError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    try:
        if args.command == "run":
            paths = run_experiment(cfg, args.out)
            print(f"wrote {len(paths)} trace file(s) to {Path(paths[0]).parent}")
        elif args.command == "sweep":
            results = run_sweep(cfg, args.out)
            out = Path(args.out or cfg.base.run.out_dir)
            print(f"wrote {len(results)} grid point(s) to {out / 'sweep.csv'}")
        elif args.command == "gen":
            out = Path(args.out or cfg.run.out_dir)
            for t in range(cfg.run.trials):
                inst = make_problem(cfg.problem, cfg.problem.seed + t)
                save_instance(inst, out / f"instance_{t:03d}.json")
            print(f"wrote {cfg.run.trials} instance(s) to {out}")
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
