"""Quick self-checks run by ``sparsethresh check``."""
from itertools import combinations

import numpy as np

from .diagnostics import gradient_fd_check, kink_adjacent, rip_constant_bruteforce
from .numerics import RandomStream, gen_classification_labels, gen_gaussian_matrix, gen_sparse_signal
from .objectives import LeastSquaresObjective, LogisticObjective, SquaredHingeObjective
from .operators import hard_threshold, natural_select

__all__ = ["run_checks"]


def _best_k_term(v, k):
    best, best_err = None, np.inf
    for S in combinations(range(v.size), k):
        z = np.zeros_like(v)
        z[list(S)] = v[list(S)]
        err = np.linalg.norm(v - z)
        if err < best_err - 1e-15:
            best, best_err = z, err
    return best


def _vertex_argmin(g, k):
    best, best_val = None, np.inf
    for S in combinations(range(g.size), k):
        val = g[list(S)].sum()
        if val < best_val - 1e-15:
            best, best_val = set(S), val
    return best


def _rip_svd(A, k):
    delta = 0.0
    for S in combinations(range(A.shape[1]), k):
        s = np.linalg.svd(A[:, list(S)], compute_uv=False)
        delta = max(delta, s[0] ** 2 - 1.0, 1.0 - s[-1] ** 2)
    return delta


def run_checks(seed=0):
    """Return ``[(name, passed, detail), ...]`` for the built-in checks."""
    stream = RandomStream(seed, key=7)
    results = []

    A = gen_gaussian_matrix(12, 8, "columns", stream)
    x = stream.normal(8)
    labels = gen_classification_labels(A, gen_sparse_signal(8, 3, stream), stream)
    objs = [LeastSquaresObjective(A, stream.normal(12)), LogisticObjective(A, labels),
            SquaredHingeObjective(A, labels)]
    for obj in objs:
        points = [stream.normal(8) for _ in range(10)]
        points = [p for p in points if not kink_adjacent(obj, p)]
        dev = max(gradient_fd_check(obj, p) for p in points)
        results.append((f"gradient {obj.name}", dev < 1e-5, f"max deviation {dev:.2e}"))

    ok = True
    for _ in range(50):
        n = 1 + int(stream.integers(10, 1)[0])
        k = int(stream.integers(n + 1, 1)[0])
        v = stream.normal(n)
        if k and not np.array_equal(hard_threshold(v, k), _best_k_term(v, k)):
            ok = False
    results.append(("hard_threshold vs enumeration", ok, "50 random vectors"))

    ok = True
    for _ in range(50):
        n = 2 + int(stream.integers(10, 1)[0])
        k = 1 + int(stream.integers(min(4, n), 1)[0])
        g = stream.normal(n)
        if set(np.flatnonzero(natural_select(g, k))) != _vertex_argmin(g, k):
            ok = False
    results.append(("natural_select vs enumeration", ok, "50 random vectors"))

    A = gen_gaussian_matrix(10, 14, "columns", stream)
    dev = max(abs(rip_constant_bruteforce(A, k) - _rip_svd(A, k)) for k in (1, 2, 3))
    results.append(("rip constant vs SVD enumeration", dev < 1e-10, f"max deviation {dev:.1e}"))
    return results
