"""Numerical instruments for checking the recovery conditions and rates.

Restricted isometry constants are computed by exhaustive support enumeration,
restricted smoothness/convexity constants by random sampling, and the linear
convergence rate from the iterate-error sequence of a run.
"""
from dataclasses import dataclass
from itertools import combinations, islice
from math import comb

import numpy as np

__all__ = [
    "ContractionReport",
    "rip_constant_bruteforce",
    "empirical_rss_rsc",
    "contraction_report",
    "gradient_fd_check",
    "kink_adjacent",
    "stochastic_step_bound",
    "MAX_SUPPORTS",
]

MAX_SUPPORTS = 10 ** 6


def rip_constant_bruteforce(A, k, max_supports=MAX_SUPPORTS, chunk=4096):
    """Restricted isometry constant of order ``k`` by enumerating all supports.

    For each ``|S| = k`` the deviation of the Gram spectrum of ``A[:, S]``
    from 1 is measured; the maximum over supports is returned.
    """
    A = np.asarray(A, dtype=float)
    n = A.shape[1]
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= {n}, got {k}")
    total = comb(n, k)
    if total > max_supports:
        raise ValueError(f"C({n},{k}) = {total} supports exceeds the enumeration guard of {max_supports}")
    G = A.T @ A
    delta = 0.0
    supports = combinations(range(n), k)
    while True:
        block = np.array(list(islice(supports, chunk)), dtype=np.int64)
        if block.size == 0:
            break
        sub = G[block[:, :, None], block[:, None, :]]
        eig = np.linalg.eigvalsh(sub)
        delta = max(delta, float(np.max(eig[:, -1] - 1.0)), float(np.max(1.0 - eig[:, 0])))
    return delta


def empirical_rss_rsc(obj, k, trials, stream, restrict_gradient=True, return_history=False):
    """Sampled estimates of the restricted smoothness and convexity constants.

    Each trial draws a support of size ``k`` and two Gaussian points on it.
    The smoothness estimate is the running maximum of the gradient-difference
    ratio (a lower bound on the true constant), the convexity estimate the
    running minimum of the Bregman ratio (an upper bound). With
    ``restrict_gradient`` the gradient difference is measured on the sampled
    support only.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    n = obj.n
    k = min(k, n)
    rss, rsc = -np.inf, np.inf
    hist = []
    for _ in range(trials):
        S = np.sort(stream.choice(n, k))
        x = np.zeros(n)
        xp = np.zeros(n)
        x[S] = stream.normal(k)
        xp[S] = stream.normal(k)
        d = xp - x
        dd = float(d @ d)
        if dd == 0.0:
            continue
        gx = obj.gradient(x)
        gdiff = obj.gradient(xp) - gx
        if restrict_gradient:
            gdiff = gdiff[S]
        rss = max(rss, float(np.linalg.norm(gdiff)) / np.sqrt(dd))
        bregman = obj.value(xp) - obj.value(x) - float(gx @ d)
        rsc = min(rsc, 2.0 * bregman / dd)
        hist.append((rss, rsc))
    if return_history:
        return rss, rsc, np.array(hist)
    return rss, rsc


@dataclass(frozen=True)
class ContractionReport:
    ratios: np.ndarray
    geometric_mean: float
    floor: float
    phase_length: int


def contraction_report(errors, floor_factor=10.0):
    """Per-step error ratios and their geometric mean before the error floor.

    The pre-floor phase is the leading run of errors above ``floor_factor``
    times the final error; when it holds no ratio, all ratios are used. The
    floor is the mean error after that phase.
    """
    e = np.asarray(errors, dtype=float)
    if e.size < 2:
        raise ValueError("need at least two error values")
    positive = e[:-1] > 0
    stop = e.size - 1 if positive.all() else int(np.argmin(positive))
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = e[1:stop + 1] / e[:stop]
    above = e > floor_factor * e[-1]
    phase = e.size if above.all() else int(np.argmin(above))
    n_ratios = min(phase, ratios.size)
    use = ratios[:n_ratios] if n_ratios >= 1 else ratios
    with np.errstate(divide="ignore", invalid="ignore"):
        gm = float(np.exp(np.mean(np.log(use)))) if use.size else float("nan")
    tail = e[phase:] if phase < e.size else e[-1:]
    return ContractionReport(ratios=ratios, geometric_mean=gm,
                             floor=float(np.mean(tail)), phase_length=int(n_ratios))


def _fd_gradient(obj, x, h):
    x = np.asarray(x, dtype=float)
    g = np.empty_like(x)
    for i in range(x.size):
        step = h * (1.0 + abs(x[i]))
        xp = x.copy()
        xm = x.copy()
        xp[i] += step
        xm[i] -= step
        g[i] = (obj.value(xp) - obj.value(xm)) / (2.0 * step)
    return g


def gradient_fd_check(obj, x, h=1e-6):
    """Worst central-difference deviation from ``obj.gradient(x)``.

    Coordinate ``i`` uses step ``h * (1 + |x_i|)``. The deviation is
    ``max|fd - g| / max(max|g|, 1)``.
    """
    if not h > 0:
        raise ValueError("h must be positive")
    g = obj.gradient(x)
    fd = _fd_gradient(obj, x, h)
    return float(np.max(np.abs(fd - g)) / max(float(np.max(np.abs(g))), 1.0))


def kink_adjacent(obj, x, h=1e-6):
    """True if some margin ``y_i a_i @ x`` of a hinge model lies within reach of 1.

    A central difference with step ``h * (1 + |x_j|)`` can move a margin by
    at most ``h * sum_j |a_ij| (1 + |x_j|)``.
    """
    if getattr(obj, "name", None) != "svm":
        return False
    x = np.asarray(x, dtype=float)
    margins = obj.target * (obj.A @ x)
    reach = h * (np.abs(obj.A) @ (1.0 + np.abs(x)))
    return bool(np.any(np.abs(margins - 1.0) <= reach))


def stochastic_step_bound(A, s, probabilities=None):
    """``max_i rho_s(i) / (M p_i)`` for the least-squares components ``M (a_i x - y_i)**2``.

    Component ``i`` has Hessian ``2 M a_i a_i^T``; its smoothness over
    supports of size ``s`` is ``2 M`` times the sum of the ``s`` largest
    ``a_ij**2``. Step sizes below ``2 / bound`` meet the single-sample
    convergence condition for stochastic hard thresholding.
    """
    A = np.asarray(A, dtype=float)
    M, n = A.shape
    s = min(s, n)
    top = -np.sort(-(A * A), axis=1)[:, :s].sum(axis=1)
    p = np.full(M, 1.0 / M) if probabilities is None else np.asarray(probabilities, dtype=float)
    return float(np.max(2.0 * M * top / (M * p)))
