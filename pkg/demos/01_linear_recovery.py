"""Recover a sparse signal from Gaussian measurements with the four linear solvers.

    python3 demos/01_linear_recovery.py
"""
from sparsethresh import (LeastSquaresObjective, RandomStream, SolverConfig, gen_gaussian_matrix,
                          gen_linear_measurements, gen_sparse_signal, run)

stream = RandomStream(seed=3)
A = gen_gaussian_matrix(60, 120, "columns", stream)
x_star = gen_sparse_signal(120, 4, stream)
obj = LeastSquaresObjective(A, gen_linear_measurements(A, x_star, 0.0, stream))

# a smaller, better conditioned problem than the 100x800 reproduction setting
for alg, step in [("IHT", 0.25), ("NTP", 0.25), ("StoIHT", 0.05), ("StoNTP", 0.25)]:
    cfg = SolverConfig(alg, k=4, step=step, batch_size=6, max_iters=300, loss_tol=1e-6,
                       pattern_rule="top_k")
    x, trace = run(obj, cfg, truth=x_star)
    print(f"{alg:7s} iterations={len(trace) - 1:4d} loss={trace.final.loss:.2e} "
          f"rel_error={trace.final.rel_error:.2e} support={trace.final.support_correct}")
