"""Residuals, termination, augmented Lagrangian, and stationarity checks."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import InvalidInputError, LagSet, check_phase_matrix, shortest_angle, wrap_phase
from .gradient import LagWorkspace, lipschitz_bound, sum_gradient
from .metrics import objective_fn
from .state import SolverState


@dataclass(frozen=True)
class ResidualReport:
    """Primal/dual residual magnitudes for one iteration.

    combined = sum of per-block squared primal norms + |T| * squared dual
    norm; the termination rule compares it against epsilon.
    """

    primal_sq_per_lag: np.ndarray  # (B,)
    dual_sq: float
    t_size: int

    @property
    def combined(self) -> float:
        return float(np.sum(self.primal_sq_per_lag) + self.t_size * self.dual_sq)


@dataclass
class ConvergenceRecord:
    k: int
    objective: float
    aug_lagrangian: float
    combined_residual: float
    consensus_gap: float
    wall_ms: float = 0.0


@dataclass
class TheoryReport:
    """Counts of runtime convergence-theory violations observed in a run."""

    sufficient_decrease_checks: int = 0
    sufficient_decrease_violations: int = 0
    lower_bound_checks: int = 0
    lower_bound_violations: int = 0
    worst_decrease_slack: float = 0.0
    details: list = field(default_factory=list)

    @property
    def total_violations(self) -> int:
        return self.sufficient_decrease_violations + self.lower_bound_violations


class TheoryViolationError(RuntimeError):
    """Raised in strict mode when a runtime theory check fails."""


def residuals(prev: SolverState, next_state: SolverState) -> ResidualReport:
    """Primal residuals rho_n*(phi_n^{k+1} - phi^k) and dual phi^{k+1} - phi^k.

    Both are measured against the previous global iterate, matching the
    reference formulation even though the ADMM dual step itself uses the new
    global iterate.
    """
    if prev.phi.shape != next_state.phi.shape:
        raise InvalidInputError("states have mismatched shapes")
    diff = next_state.phi_n - prev.phi[None, :, :]
    primal_sq = next_state.rho_n**2 * np.sum(diff**2, axis=(1, 2))
    dual_sq = float(np.sum((next_state.phi - prev.phi) ** 2))
    return ResidualReport(primal_sq, dual_sq, len(prev.t))


def termination_met(report: ResidualReport, epsilon: float) -> bool:
    return report.combined <= epsilon


def augmented_lagrangian(state: SolverState) -> float:
    """Augmented Lagrangian at the state's iterate.

    ADMM: sum over every lag block of f_n(phi_n) + <lam_n, phi_n - phi>
    + rho_n/2 ||phi_n - phi||_F^2.  PDMM: same sum over the nonzero-lag
    blocks plus the f_0 term evaluated at the global phi.
    """
    ws = LagWorkspace(state.n_len, state.block_lags)
    f_blocks, _ = ws.objective_grad(state.phi_n, with_grad=False)
    diff = state.phi_n - state.phi[None, :, :]
    inner = np.sum(state.lam_n * diff, axis=(1, 2))
    penalty = 0.5 * state.rho_n * np.sum(diff**2, axis=(1, 2))
    total = float(np.sum(f_blocks + inner + penalty))
    if state.algorithm == "pdmm":
        total += objective_fn(state.phi, 0, state.t)
    return total


def stationarity_residual(phi: np.ndarray, t: LagSet, eta: float | None = None) -> float:
    """Projected-gradient surrogate for first-order stationarity.

    Takes one explicit gradient step of length eta on the total objective,
    maps the step back with shortest angular differences, and reports the
    step norm divided by eta.  Zero exactly at points satisfying the
    periodic first-order condition.
    """
    phi = check_phase_matrix(phi)
    if eta is None:
        eta = 1.0 / (len(t) * lipschitz_bound(phi.shape[0], phi.shape[1]))
    if eta <= 0:
        raise InvalidInputError("step eta must be positive")
    g = sum_gradient(phi, t)
    moved = wrap_phase(phi - eta * g)
    step = shortest_angle(moved - phi)
    return float(np.linalg.norm(step) / eta)


def sufficient_decrease_coefficients(rho: float, l: float) -> tuple[float, float]:
    """Coefficients of the per-iteration sufficient-decrease inequality.

    Both must be nonnegative for the descent guarantee; at rho = 9L they
    evaluate to (58 L^3, 573 L^3) and the first crosses zero near
    rho = 8.41 L.
    """
    if rho <= 0 or l <= 0:
        raise InvalidInputError("rho and l must be positive")
    c_bar = rho**3 - 7 * rho**2 * l - 8 * rho * l**2 - 32 * l**3
    c_tilde = rho**3 - 12 * rho * l**2 - 48 * l**3
    return c_bar, c_tilde
