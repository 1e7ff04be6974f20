"""Thresholding and binary-vector operators.

Every selection breaks ties toward the lowest index (stable sort), so results
are deterministic for fixtures with repeated values.
"""
import numpy as np

__all__ = [
    "hard_threshold",
    "binary_round",
    "natural_select",
    "phi_value",
    "phi_grad",
    "support_of",
]


def _check_k(k, n):
    if not 0 <= k <= n:
        raise ValueError(f"sparsity level must satisfy 0 <= k <= {n}, got {k}")


def hard_threshold(v, k):
    """Keep the ``k`` largest-magnitude entries of ``v`` and zero the rest."""
    v = np.asarray(v, dtype=float)
    _check_k(k, v.size)
    keep = np.argsort(-np.abs(v), kind="stable")[:k]
    out = np.zeros_like(v)
    out[keep] = v[keep]
    return out


def binary_round(u):
    """Nearest point of ``{0, 1}^n``; an entry of exactly 0.5 rounds up."""
    return (np.asarray(u, dtype=float) >= 0.5).astype(float)


def natural_select(g, k):
    """Binary vector with ones on the ``k`` smallest entries of ``g``.

    This is the minimizer of ``g @ w`` over binary ``w`` with ``sum(w) == k``.
    """
    g = np.asarray(g, dtype=float)
    _check_k(k, g.size)
    w = np.zeros_like(g)
    w[np.argsort(g, kind="stable")[:k]] = 1.0
    return w


def phi_value(w):
    """Binary regularizer ``sum(w * (1 - w))``; zero exactly on ``{0, 1}^n``."""
    w = np.asarray(w, dtype=float)
    return float(np.sum(w * (1.0 - w)))


def phi_grad(w):
    return 1.0 - 2.0 * np.asarray(w, dtype=float)


def support_of(v, eps=0.0):
    """Sorted indices where ``|v_i| > eps``."""
    return np.flatnonzero(np.abs(np.asarray(v, dtype=float)) > eps)
