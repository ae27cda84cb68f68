"""1-D stationary mean-field games in current form: solver, verifier,
and vanishing-potential convergence harness."""

__version__ = "0.1.0"

from .model import (ConfigError, Coupling, HypothesesError, MFGError,
                    Potential, ProblemSpec, Regime, SolutionTriple,
                    SolverError, SweepReport, SweepRow, make_problem,
                    parse_config, problem_from_config)
from .numerics import (RootFindError, cumulative_integral, find_root_monotone,
                       integrate_periodic, integrate_piecewise)
from .coupling_analysis import (BranchFunction, branch_function,
                                critical_current, critical_quantities, eval_h,
                                invert_h_branch, minimizer_m_star)
from .solver import (classify_regime, limit_h_bar, reconstruct_u, solve,
                     solve_decreasing_branch, solve_decreasing_critical,
                     solve_decreasing_j0, solve_increasing_j0,
                     solve_increasing_jnz)
from .verifier import (ScanResult, VerificationReport, brute_scan_h_bar,
                       jump_detect, residuals, verify_regular)
from .convergence import (FitResult, RatePrediction, fit_loglog,
                          predict_rates, refinement_n_grid, sweep)

__all__ = [
    "__version__",
    "BranchFunction", "ConfigError", "Coupling", "FitResult",
    "HypothesesError", "MFGError", "Potential", "ProblemSpec",
    "RatePrediction", "Regime", "RootFindError", "ScanResult",
    "SolutionTriple", "SolverError", "SweepReport", "SweepRow",
    "VerificationReport",
    "branch_function", "brute_scan_h_bar", "classify_regime",
    "critical_current", "critical_quantities", "cumulative_integral",
    "eval_h", "find_root_monotone", "fit_loglog", "integrate_periodic",
    "integrate_piecewise", "invert_h_branch", "jump_detect", "limit_h_bar",
    "make_problem", "minimizer_m_star", "parse_config", "predict_rates",
    "problem_from_config", "reconstruct_u", "refinement_n_grid", "residuals",
    "solve", "solve_decreasing_branch", "solve_decreasing_critical",
    "solve_decreasing_j0", "solve_increasing_j0", "solve_increasing_jnz",
    "sweep", "verify_regular",
]
