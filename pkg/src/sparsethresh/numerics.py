"""Seeded random streams and the problem generators used by the experiments.

Uniform variates come from numpy's PCG64 bit generator, converted by hand so
the transform does not depend on numpy's ``Generator`` sampling routines:

* uniform double: ``(raw >> 11) * 2**-53`` on each 64-bit raw output, giving
  values in ``[0, 1)``;
* standard normal: Box-Muller on consecutive uniform pairs ``(u1, u2)`` using
  ``sqrt(-2 log(1 - u1)) * cos(2 pi u2)`` and the matching ``sin`` branch;
* bounded integer: ``floor(u * n)``.

PCG64 output for a given seed is fixed by its published algorithm, so streams
are reproducible across platforms.
"""
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "RandomStream",
    "ProblemInstance",
    "gen_gaussian_matrix",
    "gen_sparse_signal",
    "gen_linear_measurements",
    "gen_classification_labels",
]

_TWO_POW_M53 = 2.0 ** -53


class RandomStream:
    """Single-owner deterministic random stream.

    ``key`` selects an independent substream for the same seed, so one trial
    can draw its problem data and its solver batches from separate streams.
    """

    def __init__(self, seed, key=0):
        seed = int(seed)
        if seed < 0 or seed >= 2 ** 64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
        self.seed = seed
        self.key = int(key)
        ss = np.random.SeedSequence(entropy=seed, spawn_key=(self.key,))
        self._bitgen = np.random.PCG64(ss)

    def __repr__(self):
        return f"RandomStream(seed={self.seed}, key={self.key})"

    def uniform(self, size):
        raw = np.asarray(self._bitgen.random_raw(size), dtype=np.uint64)
        return (raw >> np.uint64(11)).astype(np.float64) * _TWO_POW_M53

    def normal(self, size):
        size = int(size)
        npairs = (size + 1) // 2
        u = self.uniform(2 * npairs).reshape(npairs, 2)
        radius = np.sqrt(-2.0 * np.log1p(-u[:, 0]))
        angle = 2.0 * np.pi * u[:, 1]
        out = np.empty((npairs, 2))
        out[:, 0] = radius * np.cos(angle)
        out[:, 1] = radius * np.sin(angle)
        return out.ravel()[:size]

    def integers(self, n, size):
        """``size`` integers uniform on ``{0, ..., n-1}``."""
        return np.floor(self.uniform(size) * n).astype(np.int64)

    def choice(self, n, size):
        """``size`` distinct indices from ``range(n)`` (partial Fisher-Yates)."""
        if size > n:
            raise ValueError(f"cannot draw {size} distinct indices from {n}")
        perm = np.arange(n)
        u = self.uniform(size)
        for i in range(size):
            j = i + int(u[i] * (n - i))
            perm[i], perm[j] = perm[j], perm[i]
        return perm[:size].copy()

    def weighted_choice(self, probs, size):
        """``size`` distinct indices drawn sequentially proportional to ``probs``."""
        probs = np.asarray(probs, dtype=float)
        if size > probs.size:
            raise ValueError(f"cannot draw {size} distinct indices from {probs.size}")
        w = probs.copy()
        out = np.empty(size, dtype=np.int64)
        u = self.uniform(size)
        for i in range(size):
            cdf = np.cumsum(w)
            j = int(np.searchsorted(cdf, u[i] * cdf[-1], side="right"))
            j = min(j, probs.size - 1)
            while w[j] == 0.0:
                j -= 1
            out[i] = j
            w[j] = 0.0
        return out


@dataclass(frozen=True)
class ProblemInstance:
    """A generated recovery problem.

    ``target`` holds measurements ``y`` for linear problems and labels in
    ``{-1, +1}`` for classification problems.
    """

    kind: str
    matrix: np.ndarray
    target: np.ndarray
    truth: np.ndarray
    sparsity: int
    seed: int
    noise_std: float = 0.0
    extra: dict = field(default_factory=dict, compare=False)

    @property
    def shape(self):
        return self.matrix.shape


def gen_gaussian_matrix(m, n, normalize="columns", stream=None):
    """I.i.d. standard normal ``m x n`` matrix, optionally with unit columns or rows."""
    if m < 1 or n < 1:
        raise ValueError(f"matrix dimensions must be positive, got {m}x{n}")
    if normalize not in ("columns", "rows", "none"):
        raise ValueError(f"unknown normalization {normalize!r}")
    stream = stream if stream is not None else RandomStream(0)
    A = stream.normal(m * n).reshape(m, n)
    if normalize == "columns":
        A /= np.linalg.norm(A, axis=0, keepdims=True)
    elif normalize == "rows":
        A /= np.linalg.norm(A, axis=1, keepdims=True)
    return A


def gen_sparse_signal(n, k, stream):
    """Unit-norm vector with ``k`` standard normal entries on a uniform support."""
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    support = np.sort(stream.choice(n, k))
    values = stream.normal(k)
    # a zero draw would break the exact-k contract; it has probability ~2**-53
    values[values == 0.0] = _TWO_POW_M53
    x = np.zeros(n)
    x[support] = values
    return x / np.linalg.norm(x)


def gen_linear_measurements(A, x_star, noise_std, stream):
    """``y = A x* + noise`` with i.i.d. ``N(0, noise_std**2)`` noise."""
    A = np.asarray(A, dtype=float)
    x_star = np.asarray(x_star, dtype=float)
    if A.ndim != 2 or x_star.shape != (A.shape[1],):
        raise ValueError(f"dimension mismatch: A {A.shape}, x* {x_star.shape}")
    if noise_std < 0:
        raise ValueError("noise_std must be nonnegative")
    y = A @ x_star
    if noise_std > 0:
        y = y + noise_std * stream.normal(A.shape[0])
    return y


def gen_classification_labels(A, x_star, stream):
    """Labels ``+1`` with probability ``sigmoid(a_i x*)``, else ``-1``."""
    A = np.asarray(A, dtype=float)
    x_star = np.asarray(x_star, dtype=float)
    if A.ndim != 2 or x_star.shape != (A.shape[1],):
        raise ValueError(f"dimension mismatch: A {A.shape}, x* {x_star.shape}")
    t = A @ x_star
    prob = np.exp(-np.logaddexp(0.0, -t))
    u = stream.uniform(A.shape[0])
    return np.where(u < prob, 1.0, -1.0)
