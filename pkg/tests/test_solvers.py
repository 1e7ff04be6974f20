from itertools import combinations

import numpy as np
import pytest

from sparsethresh import (
    LeastSquaresObjective,
    LogisticObjective,
    RandomStream,
    SolverConfig,
    gen_classification_labels,
    gen_gaussian_matrix,
    gen_linear_measurements,
    gen_sparse_signal,
    gradient_step,
    nt_select,
    run,
    solver_update,
)
from sparsethresh.solvers import ALGORITHMS

NON_TIME = ("iteration", "loss", "rel_error", "support_correct")


def toy():
    return LeastSquaresObjective(np.eye(3), [1.0, 0.0, 2.0])


def linear_instance(seed, m=40, n=80, k=4, normalize="columns"):
    s = RandomStream(seed)
    A = gen_gaussian_matrix(m, n, normalize, s)
    x = gen_sparse_signal(n, k, s)
    return LeastSquaresObjective(A, gen_linear_measurements(A, x, 0.0, s)), x


def test_deterministic_gradient_step_example():
    cfg = SolverConfig("NT", k=2, step=0.5)
    assert np.array_equal(gradient_step(np.zeros(3), toy(), cfg), [1.0, 0.0, 2.0])


@pytest.mark.parametrize("alg", ["StoIHT", "StoNT", "StoNTP"])
def test_full_batch_step_equals_deterministic(alg):
    obj, _ = linear_instance(1)
    x = RandomStream(2).normal(80)
    det = gradient_step(x, obj, SolverConfig("IHT", k=4, step=0.3))
    sto = gradient_step(x, obj, SolverConfig(alg, k=4, step=0.3, batch_size=40), RandomStream(9))
    assert np.array_equal(det, sto)


def test_singleton_steps_average_to_deterministic():
    obj, _ = linear_instance(3)
    x = RandomStream(4).normal(80)
    lam = 0.3
    det = gradient_step(x, obj, SolverConfig("IHT", k=4, step=lam))
    avg = np.mean([x - lam * obj.batch_gradient([i], x) for i in range(40)], axis=0)
    np.testing.assert_allclose(avg, det, atol=1e-12 * np.max(np.abs(det)))


def test_weighted_singleton_steps_are_unbiased():
    obj, _ = linear_instance(5)
    x = RandomStream(6).normal(80)
    p = RandomStream(7).uniform(40) + 0.1
    p /= p.sum()
    M = 40
    expected = np.sum([p[i] * obj.batch_gradient([i], x, weights=[1 / (M * p[i])])
                       for i in range(M)], axis=0)
    np.testing.assert_allclose(expected, obj.gradient(x), atol=1e-12 * np.max(np.abs(obj.gradient(x))))


def test_weighted_step_runs():
    obj, truth = linear_instance(5)
    p = np.full(40, 1 / 40)
    cfg = SolverConfig("StoIHT", k=4, step=0.05, batch_size=5, probabilities=list(p), max_iters=5)
    x, trace = run(obj, cfg, truth)
    assert len(trace) == 6 and np.count_nonzero(x) <= 4


def test_nt_select_example():
    w, S = nt_select(np.array([1.0, 0.0, 2.0]), toy(), k=2, alpha=1.0)
    assert np.array_equal(w, [1, 0, 1])
    assert list(S) == [0, 2]
    g = np.array([-1.0, 1.0, -1.0])  # alpha * (1 - 2 w-) at the exact fit
    best = min(combinations(range(3), 2), key=lambda c: g[list(c)].sum())
    assert set(best) == {0, 2}


def test_nt_select_full_support():
    obj, _ = linear_instance(8, m=10, n=6, k=2)
    u = RandomStream(1).normal(6)
    u[2] = 0.0
    w, S = nt_select(u, obj, k=6, alpha=1.0)
    assert list(S) == list(np.flatnonzero(u))


@pytest.mark.parametrize("mode", ["chain_rule", "paper_literal"])
def test_nt_select_matches_enumeration(mode):
    obj, _ = linear_instance(9, m=8, n=10, k=3)
    s = RandomStream(10)
    for _ in range(20):
        u = 2 * s.uniform(10) - 0.5
        alpha = 0.5 + s.uniform(1)[0]
        w_minus = (u >= 0.5).astype(float)
        grad = 2 * obj.A.T @ (obj.A @ (w_minus * u) - obj.target)
        g = (u * grad if mode == "chain_rule" else grad) + alpha * (1 - 2 * w_minus)
        best = min(combinations(range(10), 3), key=lambda c: g[list(c)].sum())
        w, S = nt_select(u, obj, 3, alpha, mode)
        assert set(np.flatnonzero(w)) == set(best)


def test_nt_select_top_k_pattern():
    obj, _ = linear_instance(9, m=8, n=10, k=3)
    u = RandomStream(3).normal(10)
    w_minus = np.zeros(10)
    w_minus[np.argsort(-np.abs(u))[:3]] = 1
    g = u * (2 * obj.A.T @ (obj.A @ (w_minus * u) - obj.target)) + (1 - 2 * w_minus)
    w, _ = nt_select(u, obj, 3, 1.0, pattern_rule="top_k")
    assert set(np.flatnonzero(w)) == set(np.argsort(g, kind="stable")[:3])


def test_nt_update_is_mask():
    cfg = SolverConfig("NT", k=2, step=1)
    x = solver_update(np.array([1.0, 5.0, 2.0]), np.array([1.0, 0.0, 1.0]), [0, 2], toy(), cfg)
    assert np.array_equal(x, [1, 0, 2])


def test_ntp_on_identity_equals_nt():
    obj = LeastSquaresObjective(np.eye(4), [1.0, -2.0, 0.5, 3.0])
    cfg_nt = SolverConfig("NT", k=2, step=0.5)
    cfg_ntp = SolverConfig("NTP", k=2, step=0.5)
    u = gradient_step(np.zeros(4), obj, cfg_nt)
    w, S = nt_select(u, obj, 2, 1.0)
    np.testing.assert_allclose(solver_update(u, w, S, obj, cfg_ntp),
                               solver_update(u, w, S, obj, cfg_nt), atol=1e-15)


def test_ntp_debiasing_never_hurts():
    s = RandomStream(12)
    A = s.normal(48).reshape(6, 8)
    obj = LeastSquaresObjective(A, s.normal(6))
    cfg = SolverConfig("NTP", k=3, step=0.1)
    x = np.zeros(8)
    for _ in range(10):
        u = gradient_step(x, obj, cfg)
        w, S = nt_select(u, obj, 3, 1.0)
        x = solver_update(u, w, S, obj, cfg)
        assert obj.value(x) <= obj.value(w * u) + 1e-12


def test_run_toy_converges_in_one_iteration():
    x, trace = run(toy(), SolverConfig("NT", k=2, step=0.5, alpha=1.0), truth=np.array([1.0, 0, 2]))
    assert np.array_equal(x, [1, 0, 2])
    assert [r.iteration for r in trace] == [0, 1]
    assert trace.final.loss == 0 and trace.final.support_correct
    assert trace[0].loss == pytest.approx(np.sqrt(5))


def test_full_constraint_gives_least_squares():
    s = RandomStream(13)
    A = s.normal(60).reshape(12, 5)
    y = s.normal(12)
    obj = LeastSquaresObjective(A, y)
    x, trace = run(obj, SolverConfig("NTP", k=5, step=0.1, max_iters=1, loss_tol=0.0))
    np.testing.assert_allclose(x, np.linalg.lstsq(A, y, rcond=None)[0], atol=1e-12)


def test_zero_iterations():
    x, trace = run(toy(), SolverConfig("NTP", k=2, step=0.5, max_iters=0))
    assert len(trace) == 1 and trace[0].iteration == 0
    assert np.array_equal(x, np.zeros(3))


@pytest.mark.parametrize("alg", ALGORITHMS)
def test_iterates_are_k_sparse(alg):
    obj, truth = linear_instance(14)
    seen = []
    run(obj, SolverConfig(alg, k=4, step=0.05, batch_size=8, max_iters=20, loss_tol=0),
        truth, callback=lambda it, x: seen.append(np.count_nonzero(x)))
    assert len(seen) == 21 and max(seen) <= 4


@pytest.mark.parametrize("det,sto", [("NT", "StoNT"), ("NTP", "StoNTP"), ("IHT", "StoIHT")])
def test_full_batch_traces_match_deterministic(det, sto):
    obj, truth = linear_instance(15)
    kw = dict(k=4, step=0.1, alpha=1.0, max_iters=25, loss_tol=1e-9, seed=3)
    xd, td = run(obj, SolverConfig(det, **kw), truth)
    xs, ts = run(obj, SolverConfig(sto, batch_size=40, **kw), truth)
    assert np.array_equal(xd, xs)
    for col in NON_TIME:
        assert np.array_equal(td.column(col), ts.column(col))


def test_same_seed_same_trace():
    obj, truth = linear_instance(16)
    cfg = SolverConfig("StoNTP", k=4, step=0.1, batch_size=5, max_iters=30, seed=11)
    a, ta = run(obj, cfg, truth)
    b, tb = run(obj, cfg, truth)
    assert np.array_equal(a, b)
    for col in NON_TIME:
        assert np.array_equal(ta.column(col), tb.column(col))


def test_trace_invariants():
    obj, truth = linear_instance(17)
    _, trace = run(obj, SolverConfig("StoNT", k=4, step=0.05, batch_size=10, max_iters=30), truth)
    its = trace.column("iteration")
    assert np.all(np.diff(its) > 0)
    assert np.all(np.diff(trace.column("time_s")) >= 0)


def test_stops_on_loss_tolerance():
    obj, truth = linear_instance(18)
    _, trace = run(obj, SolverConfig("NTP", k=4, step=0.25, pattern_rule="top_k", max_iters=150,
                                     loss_tol=1e-3), truth)
    assert trace.final.loss <= 1e-3 and trace.final.iteration < 150
    assert all(r.loss > 1e-3 for r in trace.records[:-1])


def test_nonlinear_general_stopping_uses_value():
    s = RandomStream(19)
    A = gen_gaussian_matrix(30, 50, "rows", s)
    labels = gen_classification_labels(A, gen_sparse_signal(50, 5, s), s)
    obj = LogisticObjective(A, labels)
    _, trace = run(obj, SolverConfig("NTP", k=10, step=10, alpha=5, max_iters=5))
    assert trace[0].loss == pytest.approx(np.log(2))


@pytest.mark.parametrize("changes", [
    dict(algorithm="OMP"), dict(step=0.0), dict(k=0), dict(k=81), dict(alpha=0.0),
    dict(batch_size=41), dict(batch_size=0), dict(gradient_mode="other"),
    dict(sampling="importance"), dict(probabilities=[1.0]), dict(max_iters=-1),
    dict(pattern_rule="median"),
])
def test_invalid_config_rejected(changes):
    obj, _ = linear_instance(20)
    base = dict(algorithm="StoNTP", k=4, step=0.1, batch_size=5)
    base.update(changes)
    with pytest.raises(ValueError):
        run(obj, SolverConfig(**base))
