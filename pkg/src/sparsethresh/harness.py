"""Experiment configuration, trial execution and CSV output.

A config file is JSON with three blocks::

    {"problem": {"type": "linear", "m": 100, "n": 800, "k": 10, "seed": 0},
     "solver":  {"algorithm": "StoNTP", "step": 2.0, "alpha": 1.0, "batch_size": 10},
     "run":     {"trials": 50, "out_dir": "out"}}

Sweep configs add a ``"grid"`` block listing values for any of
``algorithm``, ``alpha``, ``lambda`` and ``batch_size``. Unknown keys are
rejected everywhere. Trial ``t`` draws its problem from seed
``problem.seed + t`` and its batches from seed ``solver.seed + t``.
"""
import csv
import dataclasses
import io
import itertools
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .numerics import (
    ProblemInstance,
    RandomStream,
    gen_classification_labels,
    gen_gaussian_matrix,
    gen_linear_measurements,
    gen_sparse_signal,
)
from .objectives import make_objective
from .solvers import SolverConfig, run

__all__ = [
    "ConfigError",
    "ProblemSpec",
    "RunSpec",
    "ExperimentConfig",
    "SweepConfig",
    "SweepResult",
    "TRACE_HEADER",
    "SWEEP_HEADER",
    "make_problem",
    "run_trial",
    "run_experiment",
    "run_sweep",
    "trace_to_csv",
    "read_trace_csv",
    "save_instance",
    "load_instance",
    "load_config",
    "recipe_path",
    "sweep_threads",
]

TRACE_HEADER = ("iteration", "time_s", "loss", "rel_error", "support_correct")
SWEEP_HEADER = ("algorithm", "alpha", "lambda", "batch_size", "trials", "successes", "success_rate")
PROBLEM_TYPES = ("linear", "logistic", "svm")
GRID_KEYS = ("algorithm", "alpha", "lambda", "batch_size")


class ConfigError(ValueError):
    """Invalid experiment configuration."""


def _strict(cls, data, block):
    if not isinstance(data, dict):
        raise ConfigError(f"{block} block must be an object")
    names = {f.name for f in dataclasses.fields(cls)}
    unknown = sorted(set(data) - names)
    if unknown:
        raise ConfigError(f"unknown key(s) in {block} block: {', '.join(unknown)}")
    try:
        return cls(**data)
    except TypeError as exc:
        raise ConfigError(f"{block} block: {exc}") from None


@dataclass
class ProblemSpec:
    type: str
    m: int
    n: int
    k: int
    noise_std: float = 0.0
    seed: int = 0
    # None picks columns for linear problems and rows for classification
    normalize: Optional[str] = None

    def validate(self):
        if self.type not in PROBLEM_TYPES:
            raise ConfigError(f"problem type must be one of {PROBLEM_TYPES}, got {self.type!r}")
        if self.m < 1 or self.n < 1:
            raise ConfigError("m and n must be positive")
        if not 1 <= self.k <= self.n:
            raise ConfigError("k must satisfy 1 <= k <= n")
        if self.noise_std < 0:
            raise ConfigError("noise_std must be nonnegative")
        if self.seed < 0:
            raise ConfigError("seed must be nonnegative")
        if self.normalize not in (None, "columns", "rows", "none"):
            raise ConfigError(f"unknown normalization {self.normalize!r}")

    @property
    def normalization(self):
        if self.normalize is not None:
            return self.normalize
        return "columns" if self.type == "linear" else "rows"


@dataclass
class RunSpec:
    trials: int = 1
    out_dir: str = "out"
    # "off" writes time_s = 0 so repeated runs give byte-identical traces
    clock: str = "monotonic"
    write_traces: bool = True

    def validate(self):
        if self.trials < 1:
            raise ConfigError("trials must be at least 1")
        if self.clock not in ("monotonic", "off"):
            raise ConfigError("clock must be 'monotonic' or 'off'")


@dataclass
class ExperimentConfig:
    problem: ProblemSpec
    solver: SolverConfig
    run: RunSpec = field(default_factory=RunSpec)

    @classmethod
    def from_dict(cls, data):
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        unknown = sorted(set(data) - {"problem", "solver", "run"})
        if unknown:
            raise ConfigError(f"unknown top-level key(s): {', '.join(unknown)}")
        if "problem" not in data or "solver" not in data:
            raise ConfigError("config needs 'problem' and 'solver' blocks")
        problem = _strict(ProblemSpec, data["problem"], "problem")
        solver_data = dict(data["solver"]) if isinstance(data["solver"], dict) else data["solver"]
        if isinstance(solver_data, dict):
            solver_data.setdefault("k", problem.k)
            solver_data.setdefault("seed", problem.seed)
        solver = _strict(SolverConfig, solver_data, "solver")
        runspec = _strict(RunSpec, data.get("run", {}), "run")
        cfg = cls(problem, solver, runspec)
        cfg.validate()
        return cfg

    def to_dict(self):
        return {
            "problem": dataclasses.asdict(self.problem),
            "solver": dataclasses.asdict(self.solver),
            "run": dataclasses.asdict(self.run),
        }

    def validate(self):
        self.problem.validate()
        self.run.validate()
        try:
            self.solver.validate(n=self.problem.n, M=self.problem.m)
        except ValueError as exc:
            raise ConfigError(f"solver block: {exc}") from None

    def replace(self, **solver_changes):
        """Copy with selected solver fields replaced."""
        return ExperimentConfig(self.problem, dataclasses.replace(self.solver, **solver_changes),
                                self.run)


@dataclass
class SweepConfig:
    base: ExperimentConfig
    grid: dict

    @classmethod
    def from_dict(cls, data):
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        data = dict(data)
        grid = data.pop("grid", None)
        if not isinstance(grid, dict) or not grid:
            raise ConfigError("sweep config needs a nonempty 'grid' block")
        unknown = sorted(set(grid) - set(GRID_KEYS))
        if unknown:
            raise ConfigError(f"unknown key(s) in grid block: {', '.join(unknown)}")
        for key, values in grid.items():
            if not isinstance(values, list) or not values:
                raise ConfigError(f"grid entry {key!r} must be a nonempty list")
        sweep = cls(ExperimentConfig.from_dict(data), grid)
        for point in sweep.points():
            sweep.base.replace(**point).validate()
        return sweep

    def to_dict(self):
        out = self.base.to_dict()
        out["grid"] = self.grid
        return out

    def points(self):
        """Grid points as solver-field dicts, in row order of the sweep CSV."""
        s = self.base.solver
        axes = [
            self.grid.get("algorithm", [s.algorithm]),
            self.grid.get("alpha", [s.alpha]),
            self.grid.get("lambda", [s.step]),
            self.grid.get("batch_size", [s.batch_size]),
        ]
        return [dict(algorithm=a, alpha=float(al), step=float(lam), batch_size=int(bs))
                for a, al, lam, bs in itertools.product(*axes)]


@dataclass(frozen=True)
class SweepResult:
    algorithm: str
    alpha: float
    step: float
    batch_size: int
    trials: int
    successes: int

    @property
    def success_rate(self):
        return self.successes / self.trials


def load_config(path, sweep=False):
    """Read an experiment (or sweep) config from JSON."""
    try:
        with open(path) as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from None
    return SweepConfig.from_dict(data) if sweep else ExperimentConfig.from_dict(data)


def recipe_path(name):
    """Path of a reproduction recipe shipped in ``sparsethresh/configs``."""
    path = Path(__file__).with_name("configs") / (name if name.endswith(".json") else f"{name}.json")
    if not path.exists():
        raise FileNotFoundError(f"no recipe named {name!r}")
    return path


def make_problem(spec, seed=None):
    """Generate the problem instance for ``spec`` (seed defaults to ``spec.seed``)."""
    spec.validate()
    seed = spec.seed if seed is None else seed
    stream = RandomStream(seed, key=0)
    A = gen_gaussian_matrix(spec.m, spec.n, spec.normalization, stream)
    truth = gen_sparse_signal(spec.n, spec.k, stream)
    if spec.type == "linear":
        target = gen_linear_measurements(A, truth, spec.noise_std, stream)
    else:
        target = gen_classification_labels(A, truth, stream)
    return ProblemInstance(spec.type, A, target, truth, spec.k, seed, spec.noise_std)


def _clock(config):
    if config.run.clock == "off":
        return lambda: 0
    import time
    return time.perf_counter_ns


def run_trial(config, trial=0):
    """Run one seeded trial; returns ``(instance, objective, x_final, trace)``."""
    inst = make_problem(config.problem, config.problem.seed + trial)
    obj = make_objective(inst.kind, inst.matrix, inst.target)
    solver = dataclasses.replace(config.solver, seed=config.solver.seed + trial)
    x, trace = run(obj, solver, truth=inst.truth, clock=_clock(config))
    return inst, obj, x, trace


def _fmt(v):
    return repr(float(v))


def trace_to_csv(trace):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(TRACE_HEADER)
    for r in trace:
        w.writerow([r.iteration, f"{r.time_s:.9f}", _fmt(r.loss), _fmt(r.rel_error),
                    int(bool(r.support_correct))])
    return buf.getvalue()


def read_trace_csv(path):
    """Parse a trace CSV back into a list of row dicts with typed values."""
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != TRACE_HEADER:
            raise ValueError(f"{path}: unexpected header {reader.fieldnames}")
        return [
            {"iteration": int(r["iteration"]), "time_s": float(r["time_s"]),
             "loss": float(r["loss"]), "rel_error": float(r["rel_error"]),
             "support_correct": bool(int(r["support_correct"]))}
            for r in reader
        ]


def _write(path, text):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        fh.write(text)
    return path


def run_experiment(config, out_dir=None):
    """Run every trial and write ``trial_NNN.csv`` traces; returns the paths."""
    config.validate()
    out = Path(out_dir if out_dir is not None else config.run.out_dir)
    paths = []
    for t in range(config.run.trials):
        _, _, _, trace = run_trial(config, t)
        paths.append(_write(out / f"trial_{t:03d}.csv", trace_to_csv(trace)))
    return paths


def sweep_threads():
    """Worker count from ``SPARSETHRESH_THREADS`` (unset or 0 means all CPUs)."""
    raw = os.environ.get("SPARSETHRESH_THREADS", "0").strip() or "0"
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(f"SPARSETHRESH_THREADS must be an integer, got {raw!r}") from None
    if n < 0:
        raise ConfigError("SPARSETHRESH_THREADS must be nonnegative")
    return n if n > 0 else (os.cpu_count() or 1)


def _sweep_task(args):
    config, trial = args
    _, _, x, trace = run_trial(config, trial)
    csv_text = trace_to_csv(trace) if config.run.write_traces else None
    return bool(trace.final.support_correct), csv_text


def _point_dir(point):
    return (f"{point['algorithm']}_alpha{point['alpha']:g}_lambda{point['step']:g}"
            f"_bs{point['batch_size']}")


def sweep_to_csv(results):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SWEEP_HEADER)
    for r in results:
        w.writerow([r.algorithm, _fmt(r.alpha), _fmt(r.step), r.batch_size, r.trials,
                    r.successes, _fmt(r.success_rate)])
    return buf.getvalue()


def run_sweep(sweep, out_dir=None, threads=None):
    """Success rates over the grid; writes ``sweep.csv`` and returns the results.

    A trial succeeds when the final iterate has exactly the true support.
    Rows follow grid order whatever the completion order of the workers.
    """
    out = Path(out_dir if out_dir is not None else sweep.base.run.out_dir)
    trials = sweep.base.run.trials
    if trials < 1:
        raise ConfigError("trials must be at least 1")
    points = sweep.points()
    tasks = [(sweep.base.replace(**p), t) for p in points for t in range(trials)]
    threads = sweep_threads() if threads is None else threads
    if threads > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=min(threads, len(tasks))) as pool:
            outcomes = list(pool.map(_sweep_task, tasks, chunksize=max(1, len(tasks) // (4 * threads))))
    else:
        outcomes = [_sweep_task(t) for t in tasks]
    results = []
    for i, p in enumerate(points):
        chunk = outcomes[i * trials:(i + 1) * trials]
        results.append(SweepResult(p["algorithm"], p["alpha"], p["step"], p["batch_size"],
                                   trials, sum(ok for ok, _ in chunk)))
        if sweep.base.run.write_traces:
            for t, (_, text) in enumerate(chunk):
                _write(out / "traces" / _point_dir(p) / f"trial_{t:03d}.csv", text)
    _write(out / "sweep.csv", sweep_to_csv(results))
    return results


def save_instance(inst, path):
    """Write a problem instance as JSON with flat row-major arrays."""
    m, n = inst.matrix.shape
    data = {
        "type": inst.kind, "m": m, "n": n, "k": int(inst.sparsity), "seed": int(inst.seed),
        "noise_std": float(inst.noise_std),
        "matrix": [float(v) for v in inst.matrix.ravel()],
        "target": [float(v) for v in inst.target],
        "truth": [float(v) for v in inst.truth],
    }
    return _write(path, json.dumps(data))


def load_instance(path):
    with open(path) as fh:
        data = json.load(fh)
    m, n = int(data["m"]), int(data["n"])
    A = np.array(data["matrix"], dtype=float)
    if A.size != m * n:
        raise ValueError(f"{path}: matrix has {A.size} entries, expected {m * n}")
    return ProblemInstance(data["type"], A.reshape(m, n), np.array(data["target"], dtype=float),
                           np.array(data["truth"], dtype=float), int(data["k"]), int(data["seed"]),
                           float(data.get("noise_std", 0.0)))
