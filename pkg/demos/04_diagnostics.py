"""Restricted isometry constants, restricted smoothness and empirical contraction.

    python3 demos/04_diagnostics.py
"""
from sparsethresh import (LeastSquaresObjective, RandomStream, SolverConfig, contraction_report,
                          empirical_rss_rsc, gen_gaussian_matrix, gen_linear_measurements,
                          gen_sparse_signal, rip_constant_bruteforce, run, stochastic_step_bound)

stream = RandomStream(seed=11)
small = gen_gaussian_matrix(20, 40, "columns", stream)
for k in (1, 2, 3):
    print(f"delta_{k} of a 20x40 matrix: {rip_constant_bruteforce(small, k):.3f}")

A = gen_gaussian_matrix(100, 200, "columns", stream)
x_star = gen_sparse_signal(200, 5, stream)
obj = LeastSquaresObjective(A, gen_linear_measurements(A, x_star, 0.0, stream))
rss, rsc = empirical_rss_rsc(obj, 10, 200, stream)
print(f"empirical restricted smoothness {rss:.2f}, convexity {rsc:.2f}")

bound = stochastic_step_bound(A, 15)
for alg, step, bs in (("StoIHT", 1.9 / bound, 1), ("StoNTP", 1.9 / bound, 1), ("StoIHT", 0.1, 20)):
    _, trace = run(obj, SolverConfig(alg, k=5, step=step, batch_size=bs, max_iters=1000, loss_tol=1e-12),
                   truth=x_star)
    rep = contraction_report(trace.column("rel_error"))
    print(f"{alg} step={step:.4f} bs={bs}: geometric-mean contraction {rep.geometric_mean:.4f} "
          f"over {rep.phase_length} steps")
