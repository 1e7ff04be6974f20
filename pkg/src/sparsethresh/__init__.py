"""Sparse recovery with hard and natural thresholding, deterministic and stochastic."""
from .diagnostics import (
    ContractionReport,
    contraction_report,
    empirical_rss_rsc,
    gradient_fd_check,
    rip_constant_bruteforce,
    stochastic_step_bound,
)
from .harness import (
    ConfigError,
    ExperimentConfig,
    ProblemSpec,
    RunSpec,
    SweepConfig,
    load_config,
    load_instance,
    make_problem,
    recipe_path,
    run_experiment,
    run_sweep,
    run_trial,
    save_instance,
)
from .metrics import misclassification_rate, relative_error, support_success
from .numerics import (
    ProblemInstance,
    RandomStream,
    gen_classification_labels,
    gen_gaussian_matrix,
    gen_linear_measurements,
    gen_sparse_signal,
)
from .objectives import (
    LeastSquaresObjective,
    LogisticObjective,
    Objective,
    SquaredHingeObjective,
    make_objective,
)
from .operators import binary_round, hard_threshold, natural_select, phi_grad, phi_value, support_of
from .solvers import ALGORITHMS, SolverConfig, Trace, TraceRecord, gradient_step, nt_select, run, solver_update

__version__ = "0.1.0"
