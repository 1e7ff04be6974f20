"""Recovery metrics reported by the experiment traces."""
import numpy as np

from .operators import support_of

__all__ = ["relative_error", "support_success", "misclassification_rate", "SUPPORT_EPS"]

SUPPORT_EPS = 1e-10


def relative_error(x, x_star):
    x_star = np.asarray(x_star, dtype=float)
    denom = np.linalg.norm(x_star)
    if denom == 0:
        raise ValueError("relative error is undefined for a zero reference vector")
    return float(np.linalg.norm(np.asarray(x, dtype=float) - x_star) / denom)


def support_success(x, x_star, eps=SUPPORT_EPS):
    """True iff the support of ``x`` (entries above ``eps``) equals that of ``x_star``."""
    return bool(np.array_equal(support_of(x, eps), support_of(x_star, 0.0)))


def misclassification_rate(A, labels, x):
    """Fraction of rows with ``sign(a_i @ x) != y_i``; a zero margin counts as an error."""
    pred = np.sign(np.asarray(A, dtype=float) @ np.asarray(x, dtype=float))
    return float(np.mean(pred != np.asarray(labels, dtype=float)))
