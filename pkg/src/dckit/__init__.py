"""dckit: inertial DC algorithms with certified inexact subproblems."""
from .core import (
    Algorithm,
    DcProblem,
    IterationRecord,
    SolverConfig,
    Termination,
    Trace,
    ValidationReport,
    evaluate_objective,
    lyapunov_value,
    regularize,
    validate_problem,
)
from .solvers import (
    BoundReport,
    criticality_residual,
    energy_along_trace,
    gamma_sup_exact,
    gamma_sup_inexact,
    run,
    run_dca,
    run_rindca_exact,
    run_rindca_inexact,
    run_sdca,
)

__version__ = "0.1.0"
