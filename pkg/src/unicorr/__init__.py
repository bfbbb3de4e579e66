"""unicorr: design unimodular sequence sets with low auto/cross-correlation
over a chosen lag window, via consensus splitting solvers."""

from .accel import AccelConfig, agd_extrapolate, sbcd_select
from .admm import (
    SolveResult,
    admm_dual_update,
    admm_init,
    admm_phi_update,
    admm_phin_update,
    solve_admm,
)
from .config import ConfigError, RunConfig, parse_config
from .core import (
    InvalidInputError,
    InvalidLagError,
    LagSet,
    phases_to_sequences,
    shift_correlation,
    wrap_phase,
)
from .diagnostics import (
    ConvergenceRecord,
    ResidualReport,
    TheoryReport,
    TheoryViolationError,
    augmented_lagrangian,
    residuals,
    stationarity_residual,
    termination_met,
)
from .estimators import ConsensusADMMDesigner, ConsensusPDMMDesigner
from .gradient import (
    DegenerateModelError,
    grad_fd_oracle,
    grad_fn,
    lipschitz_bound,
    sum_gradient,
)
from .metrics import ccl, correlation_level_db, isl, objective_fn, objective_total
from .pdmm import (
    pdmm_dual_update,
    pdmm_init,
    pdmm_phi_update,
    pdmm_phin_update,
    solve_pdmm,
)
from .state import SolverState, spawn_streams

__version__ = "1.0.0"

__all__ = [
    "AccelConfig",
    "ConfigError",
    "ConsensusADMMDesigner",
    "ConsensusPDMMDesigner",
    "ConvergenceRecord",
    "DegenerateModelError",
    "InvalidInputError",
    "InvalidLagError",
    "LagSet",
    "ResidualReport",
    "RunConfig",
    "SolveResult",
    "SolverState",
    "TheoryReport",
    "TheoryViolationError",
    "admm_dual_update",
    "admm_init",
    "admm_phi_update",
    "admm_phin_update",
    "agd_extrapolate",
    "augmented_lagrangian",
    "ccl",
    "correlation_level_db",
    "grad_fd_oracle",
    "grad_fn",
    "isl",
    "lipschitz_bound",
    "objective_fn",
    "objective_total",
    "parse_config",
    "pdmm_dual_update",
    "pdmm_init",
    "pdmm_phi_update",
    "pdmm_phin_update",
    "phases_to_sequences",
    "residuals",
    "sbcd_select",
    "shift_correlation",
    "solve_admm",
    "solve_pdmm",
    "spawn_streams",
    "stationarity_residual",
    "sum_gradient",
    "termination_met",
    "wrap_phase",
]
