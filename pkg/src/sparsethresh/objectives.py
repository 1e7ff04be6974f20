"""Separable objectives ``f(x) = (1/M) * sum_i f_i(x)`` over the rows of a matrix.

Each component depends on ``x`` only through the margin ``t_i = a_i @ x``, so
a model is defined by the component value ``f_i(t)`` and its derivative
``c_i(t)``; the component gradient is then ``c_i(t_i) * a_i``.
"""
import numpy as np

__all__ = [
    "Objective",
    "LeastSquaresObjective",
    "LogisticObjective",
    "SquaredHingeObjective",
    "make_objective",
]


class Objective:
    """Base class for margin-based separable objectives.

    Subclasses implement ``_component_values(t)`` and ``_component_slopes(t, rows)``
    where ``rows`` indexes the target entries matching ``t``.
    """

    name = "objective"

    def __init__(self, A, target):
        A = np.array(A, dtype=float)
        target = np.array(target, dtype=float)
        if A.ndim != 2 or target.shape != (A.shape[0],):
            raise ValueError(f"dimension mismatch: A {A.shape}, target {target.shape}")
        self.A = A
        self.target = target
        self.A.setflags(write=False)
        self.target.setflags(write=False)

    @property
    def n(self):
        return self.A.shape[1]

    def component_count(self):
        return self.A.shape[0]

    def _check_x(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape != (self.n,):
            raise ValueError(f"expected a vector of length {self.n}, got shape {x.shape}")
        return x

    def _component_values(self, t, rows=None):
        raise NotImplementedError

    def _component_slopes(self, t, rows=None):
        raise NotImplementedError

    def component_values(self, x):
        x = self._check_x(x)
        return self._component_values(self.A @ x)

    def value(self, x):
        return float(np.mean(self.component_values(x)))

    def loss(self, x):
        """Quantity compared against the stopping tolerance."""
        return self.value(x)

    def gradient(self, x):
        x = self._check_x(x)
        c = self._component_slopes(self.A @ x)
        return self.A.T @ c / self.component_count()

    def component_gradient(self, i, x):
        x = self._check_x(x)
        rows = np.array([i])
        t = self.A[rows] @ x
        return self._component_slopes(t, rows)[0] * self.A[i]

    def batch_gradient(self, batch, x, weights=None):
        """Mean of ``weights[j] * grad f_{batch[j]}(x)`` over the batch.

        A batch covering every component with no weights is routed through
        ``gradient`` so that full-batch stochastic steps match deterministic
        ones bit for bit.
        """
        batch = np.asarray(batch, dtype=np.int64).ravel()
        if batch.size == 0:
            raise ValueError("batch must be nonempty")
        M = self.component_count()
        if batch.min() < 0 or batch.max() >= M:
            raise ValueError(f"batch indices must lie in [0, {M})")
        x = self._check_x(x)
        if weights is None and batch.size == M and np.array_equal(np.sort(batch), np.arange(M)):
            return self.gradient(x)
        A_B = self.A[batch]
        c = self._component_slopes(A_B @ x, batch)
        if weights is not None:
            c = c * np.asarray(weights, dtype=float)
        return A_B.T @ c / batch.size

    def restricted_minimize(self, support, x0, tol=1e-8, max_inner=500, return_info=False):
        """Minimize over vectors supported on ``support``, warm-started at ``x0``.

        Gradient descent on the free coordinates with Armijo backtracking; the
        trial step is the Barzilai-Borwein step from the previous iterate.
        """
        support = np.asarray(support, dtype=np.int64)
        if support.size == 0:
            raise ValueError("support must be nonempty")
        x0 = self._check_x(x0)
        M = self.component_count()
        A_S = self.A[:, support]
        z = x0[support].copy()

        def fval(t):
            return float(np.mean(self._component_values(t)))

        t = A_S @ z
        f = fval(t)
        g = A_S.T @ self._component_slopes(t) / M
        gnorm = float(np.linalg.norm(g))
        step = 1.0 / max(np.sum(A_S * A_S) / M, 1e-12)
        it = 0
        while gnorm > tol and it < max_inner:
            it += 1
            gg = gnorm * gnorm
            while True:
                z_new = z - step * g
                t_new = A_S @ z_new
                f_new = fval(t_new)
                if f_new <= f - 1e-4 * step * gg or step < 1e-20:
                    break
                step *= 0.5
            g_new = A_S.T @ self._component_slopes(t_new) / M
            s = z_new - z
            dg = g_new - g
            sy = float(s @ dg)
            z, t, f, g = z_new, t_new, f_new, g_new
            gnorm = float(np.linalg.norm(g))
            step = float(s @ s) / sy if sy > 0 else 2.0 * step
        out = np.zeros(self.n)
        out[support] = z
        if return_info:
            return out, {"degenerate": False, "iterations": it, "grad_norm": gnorm}
        return out


class LeastSquaresObjective(Objective):
    """``f(x) = ||A x - y||^2`` with components ``M * (a_i @ x - y_i)**2``."""

    name = "linear"

    def _component_values(self, t, rows=None):
        y = self.target if rows is None else self.target[rows]
        return self.component_count() * (t - y) ** 2

    def _component_slopes(self, t, rows=None):
        y = self.target if rows is None else self.target[rows]
        return 2.0 * self.component_count() * (t - y)

    def residual(self, x):
        return self.A @ self._check_x(x) - self.target

    def value(self, x):
        r = self.residual(x)
        return float(r @ r)

    def loss(self, x):
        return float(np.linalg.norm(self.residual(x)))

    def gradient(self, x):
        return 2.0 * (self.A.T @ self.residual(x))

    def restricted_minimize(self, support, x0=None, tol=1e-8, max_inner=500, return_info=False):
        """Least-squares fit on the columns in ``support``.

        Solved directly; a rank-deficient column block gets the minimum-norm
        solution and ``degenerate=True`` in the info dict.
        """
        support = np.asarray(support, dtype=np.int64)
        if support.size == 0:
            raise ValueError("support must be nonempty")
        A_S = self.A[:, support]
        z, _, rank, _ = np.linalg.lstsq(A_S, self.target, rcond=None)
        out = np.zeros(self.n)
        out[support] = z
        if return_info:
            return out, {"degenerate": bool(rank < support.size), "iterations": 0,
                         "grad_norm": float(np.linalg.norm(2.0 * A_S.T @ (A_S @ z - self.target)))}
        return out


class LogisticObjective(Objective):
    """Mean of ``log(1 + exp(-2 y_i a_i @ x))`` over labels ``y_i`` in ``{-1, +1}``."""

    name = "logistic"

    def _component_values(self, t, rows=None):
        y = self.target if rows is None else self.target[rows]
        return np.logaddexp(0.0, -2.0 * y * t)

    def _component_slopes(self, t, rows=None):
        y = self.target if rows is None else self.target[rows]
        s = 2.0 * y * t
        # sigmoid(-s) without overflow
        return -2.0 * y * np.exp(-np.logaddexp(0.0, s))


class SquaredHingeObjective(Objective):
    """Mean of ``0.5 * max(0, 1 - y_i a_i @ x)**2``; slope 0 at the kink."""

    name = "svm"

    def _component_values(self, t, rows=None):
        y = self.target if rows is None else self.target[rows]
        return 0.5 * np.maximum(0.0, 1.0 - y * t) ** 2

    def _component_slopes(self, t, rows=None):
        y = self.target if rows is None else self.target[rows]
        return -y * np.maximum(0.0, 1.0 - y * t)


_KINDS = {
    "linear": LeastSquaresObjective,
    "logistic": LogisticObjective,
    "svm": SquaredHingeObjective,
}


def make_objective(kind, A, target):
    try:
        cls = _KINDS[kind]
    except KeyError:
        raise ValueError(f"unknown problem type {kind!r}; expected one of {sorted(_KINDS)}") from None
    return cls(A, target)
