import numpy as np
import pytest

from sparsethresh import RandomStream, gen_gaussian_matrix, gen_sparse_signal, gen_linear_measurements


@pytest.fixture
def stream():
    return RandomStream(20240601)


@pytest.fixture
def small_linear(stream):
    A = gen_gaussian_matrix(6, 8, "columns", stream)
    x = gen_sparse_signal(8, 3, stream)
    return A, x, gen_linear_measurements(A, x, 0.0, stream)


def numeric_gradient(f, x, h=1e-6):
    """Central differences, written independently of the package's checker."""
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    for i in range(x.size):
        step = h * (1 + abs(x[i]))
        e = np.zeros_like(x)
        e[i] = step
        out[i] = (f(x + e) - f(x - e)) / (2 * step)
    return out


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda l: int(l.split("]")[0].split("[")[1])):
            terminalreporter.write_line(line)
