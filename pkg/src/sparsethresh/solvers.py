"""Hard- and natural-thresholding solvers, deterministic and stochastic.

All six algorithms share one outer loop::

    u = x - step * (full or mini-batch gradient)
    IHT family:  x = hard_threshold(u, k)
    NT family:   w = natural_select(selection_gradient(u), k)
                 x = w * u                       (NT, StoNT)
                 x = argmin f on supp(w * u)     (NTP, StoNTP)

Iteration starts from ``x = 0`` and stops after ``max_iters`` updates or as
soon as ``objective.loss(x) <= loss_tol``.
"""
import time
from dataclasses import dataclass, asdict, field
from typing import NamedTuple, Optional

import numpy as np

from .metrics import relative_error, support_success
from .numerics import RandomStream
from .operators import binary_round, hard_threshold, natural_select, phi_grad, support_of

__all__ = [
    "ALGORITHMS",
    "SolverConfig",
    "TraceRecord",
    "Trace",
    "gradient_step",
    "nt_select",
    "solver_update",
    "run",
]

ALGORITHMS = ("IHT", "StoIHT", "NT", "NTP", "StoNT", "StoNTP")
STOCHASTIC = frozenset({"StoIHT", "StoNT", "StoNTP"})
NT_FAMILY = frozenset({"NT", "NTP", "StoNT", "StoNTP"})
PURSUIT = frozenset({"NTP", "StoNTP"})
GRADIENT_MODES = ("chain_rule", "paper_literal")
PATTERN_RULES = ("round", "top_k")


@dataclass
class SolverConfig:
    algorithm: str
    k: int
    step: float
    alpha: float = 1.0
    batch_size: int = 1
    sampling: str = "uniform"
    # optional component probabilities; None means uniform
    probabilities: Optional[list] = None
    max_iters: int = 150
    loss_tol: float = 1e-3
    gradient_mode: str = "chain_rule"
    # binary point where the relaxation gradient is taken: nearest point of
    # {0,1}^n ("round") or the indicator of the k largest |u_i| ("top_k")
    pattern_rule: str = "round"
    seed: int = 0
    inner_tol: float = 1e-8
    max_inner: int = 500

    @property
    def stochastic(self):
        return self.algorithm in STOCHASTIC

    def validate(self, n=None, M=None):
        """Raise ``ValueError`` describing the first invalid field."""
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algorithm!r}; expected one of {ALGORITHMS}")
        if not self.step > 0:
            raise ValueError("step must be positive")
        if self.k < 1 or (n is not None and self.k > n):
            raise ValueError(f"k must satisfy 1 <= k <= n, got k={self.k}")
        if self.algorithm in NT_FAMILY and not self.alpha > 0:
            raise ValueError("alpha must be positive for natural thresholding")
        if self.gradient_mode not in GRADIENT_MODES:
            raise ValueError(f"gradient_mode must be one of {GRADIENT_MODES}")
        if self.pattern_rule not in PATTERN_RULES:
            raise ValueError(f"pattern_rule must be one of {PATTERN_RULES}")
        if self.sampling != "uniform":
            raise ValueError("only 'uniform' sampling is supported")
        if self.max_iters < 0:
            raise ValueError("max_iters must be nonnegative")
        if self.loss_tol < 0:
            raise ValueError("loss_tol must be nonnegative")
        if self.stochastic:
            if self.batch_size < 1 or (M is not None and self.batch_size > M):
                raise ValueError(f"batch_size must satisfy 1 <= bs <= M, got {self.batch_size}")
            if self.probabilities is not None:
                p = np.asarray(self.probabilities, dtype=float)
                if M is not None and p.shape != (M,):
                    raise ValueError(f"probabilities must have length M={M}")
                if np.any(p <= 0) or abs(p.sum() - 1.0) > 1e-9:
                    raise ValueError("probabilities must be positive and sum to 1")
        if self.seed < 0:
            raise ValueError("seed must be nonnegative")

    def to_dict(self):
        return asdict(self)


class TraceRecord(NamedTuple):
    iteration: int
    time_s: float
    loss: float
    rel_error: float
    support_correct: bool


@dataclass
class Trace:
    records: list = field(default_factory=list)

    def __len__(self):
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def __getitem__(self, i):
        return self.records[i]

    @property
    def final(self):
        return self.records[-1]

    def column(self, name):
        return np.array([getattr(r, name) for r in self.records])

    def iterations_to_tolerance(self, tol):
        """First iteration whose loss is within ``tol``, or ``None``."""
        for r in self.records:
            if r.loss <= tol:
                return r.iteration
        return None


def gradient_step(x, obj, config, stream=None):
    """Return ``u = x - step * g`` with the full or sampled gradient ``g``."""
    if not config.stochastic:
        return x - config.step * obj.gradient(x)
    M = obj.component_count()
    if config.probabilities is None:
        batch = stream.choice(M, config.batch_size)
        return x - config.step * obj.batch_gradient(batch, x)
    p = np.asarray(config.probabilities, dtype=float)
    batch = stream.weighted_choice(p, config.batch_size)
    weights = 1.0 / (M * p[batch])
    return x - config.step * obj.batch_gradient(batch, x, weights=weights)


def binary_pattern(u, k, rule="round"):
    if rule == "round":
        return binary_round(u)
    if rule == "top_k":
        return (hard_threshold(u, k) != 0).astype(float)
    raise ValueError(f"unknown pattern_rule {rule!r}")


def selection_gradient(u, obj, alpha, gradient_mode="chain_rule", w_minus=None):
    """Gradient of the binary relaxation ``w -> f(u * w) + alpha * phi(w)``.

    Evaluated at ``w_minus`` (default ``binary_round(u)``). ``paper_literal``
    drops the factor ``u`` that the chain rule puts in front of ``grad f``.
    """
    if w_minus is None:
        w_minus = binary_round(u)
    g = obj.gradient(w_minus * u)
    if gradient_mode == "chain_rule":
        g = u * g
    elif gradient_mode != "paper_literal":
        raise ValueError(f"unknown gradient_mode {gradient_mode!r}")
    return g + alpha * phi_grad(w_minus)


def nt_select(u, obj, k, alpha, gradient_mode="chain_rule", pattern_rule="round"):
    """Natural-thresholding selection; returns ``(w_plus, support)``."""
    u = np.asarray(u, dtype=float)
    if not 0 < k <= u.size:
        raise ValueError(f"k must satisfy 0 < k <= {u.size}, got {k}")
    w_minus = binary_pattern(u, k, pattern_rule)
    w_plus = natural_select(selection_gradient(u, obj, alpha, gradient_mode, w_minus), k)
    return w_plus, support_of(w_plus * u, 0.0)


def solver_update(u, w_plus, support, obj, config):
    alg = config.algorithm
    if alg in ("IHT", "StoIHT"):
        return hard_threshold(u, config.k)
    candidate = w_plus * u
    if alg in PURSUIT:
        if len(support) == 0:
            return candidate
        return obj.restricted_minimize(support, candidate, tol=config.inner_tol,
                                       max_inner=config.max_inner)
    return candidate


def run(obj, config, truth=None, x0=None, clock=time.perf_counter_ns, callback=None):
    """Run the configured solver on ``obj``; returns ``(x_final, trace)``.

    ``truth`` enables the relative-error and support columns of the trace;
    without it they are ``nan`` and ``False``. ``callback(iteration, x)`` is
    called after every recorded iterate, including iteration 0.
    """
    config.validate(n=obj.n, M=obj.component_count())
    stream = RandomStream(config.seed, key=1) if config.stochastic else None
    x = np.zeros(obj.n) if x0 is None else np.array(x0, dtype=float)
    if truth is not None:
        truth = np.asarray(truth, dtype=float)
    trace = Trace()
    start = clock()

    def record(it):
        loss = obj.loss(x)
        if truth is not None:
            rel, ok = relative_error(x, truth), support_success(x, truth)
        else:
            rel, ok = float("nan"), False
        trace.records.append(TraceRecord(it, (clock() - start) * 1e-9, loss, rel, ok))
        if callback is not None:
            callback(it, x)
        return loss

    loss = record(0)
    for it in range(1, config.max_iters + 1):
        if loss <= config.loss_tol:
            break
        u = gradient_step(x, obj, config, stream)
        if config.algorithm in NT_FAMILY:
            w_plus, S = nt_select(u, obj, config.k, config.alpha, config.gradient_mode,
                                 config.pattern_rule)
        else:
            w_plus, S = None, None
        x = solver_update(u, w_plus, S, obj, config)
        loss = record(it)
    return x, trace
