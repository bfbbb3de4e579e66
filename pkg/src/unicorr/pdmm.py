"""Consensus-PDMM solver: the zero-lag term is absorbed into the global phase
update and every block update in an iteration reads only iteration-k values
(Jacobi semantics, snapshot in / commit out)."""

from __future__ import annotations

import time

import numpy as np

from .accel import AccelConfig, agd_extrapolate, sbcd_mask
from .core import InvalidInputError, InvalidLagError, LagSet
from .diagnostics import ConvergenceRecord, TheoryReport, residuals, termination_met
from .gradient import LagWorkspace, grad_fn
from .admm import SolveResult, _init_state, projector
from .state import (
    STOP_CONVERGED,
    STOP_DIVERGED,
    STOP_ITERATION_BUDGET,
    SolverState,
    spawn_streams,
)

DIVERGENCE_FACTOR = 1e3  # abort when the objective blows past this multiple


def _require_zero_lag(t: LagSet) -> None:
    if not t.include_zero:
        raise InvalidInputError(
            "PDMM needs lag 0 in the lag set (its zero-lag term lives in the "
            "global phase update); use the ADMM solver for windows without lag 0"
        )


def pdmm_init(
    n_len: int,
    m_count: int,
    t: LagSet,
    rho_multiplier: float = 9.0,
    seed: int = 0,
    lambda_init: str = "uniform",
) -> SolverState:
    _require_zero_lag(t)
    streams = spawn_streams(seed)
    return _init_state("pdmm", n_len, m_count, t, rho_multiplier, streams, lambda_init)


def pdmm_phi_update(state: SolverState, projection: str = "wrap") -> np.ndarray:
    """Global step with the zero-lag gradient taken at the current phi:

    project((L0*phi - grad f_0(phi) + sum_n (lam_n + rho_n*phi_n)) / (L0 + sum rho_n)).
    """
    project = projector(projection)
    g0 = grad_fn(state.phi, 0)
    numer = state.l0 * state.phi - g0 + np.sum(
        state.lam_n + state.rho_n[:, None, None] * state.phi_n, axis=0
    )
    denom = state.l0 + state.rho_n.sum()
    return project(numer / denom)


def pdmm_phin_update(state: SolverState, n: int) -> np.ndarray:
    """Block step from iteration-k values only; the gradient is evaluated at
    the local copy phi_n, not at the global phi."""
    if n == 0:
        raise InvalidLagError("lag 0 has no consensus block under PDMM")
    b = int(np.flatnonzero(state.block_lags == n)[0])
    g = grad_fn(state.phi_n[b], n)
    return (
        state.l_n[b] * state.phi_n[b]
        + state.rho_n[b] * state.phi
        - state.lam_n[b]
        - g
    ) / (state.l_n[b] + state.rho_n[b])


def pdmm_dual_update(state: SolverState, n: int, phin_next: np.ndarray) -> np.ndarray:
    """Dual ascent against the *current* global phi: lam + rho*(phi_n^{k+1} - phi^k)."""
    if n == 0:
        raise InvalidLagError("lag 0 has no consensus block under PDMM")
    b = int(np.flatnonzero(state.block_lags == n)[0])
    return state.lam_n[b] + state.rho_n[b] * (phin_next - state.phi)


def _pdmm_step(state, ws, mask, project, momentum, record_time):
    """One Jacobi iteration: all updates computed from the snapshot, then
    committed at once."""
    t0 = time.perf_counter() if record_time else 0.0

    # rows of the stacked input: 0 -> (lag 0, phi), 1.. -> (block lags, phi_n)
    stack = np.concatenate([state.phi[None], state.phi_n], axis=0)
    rows = np.concatenate(([0], 1 + np.flatnonzero(mask)))
    _, grads = ws.objective_grad(stack, grad_rows=rows)
    g0 = grads[0]
    g_sel = grads[1:]
    sel = np.flatnonzero(mask)

    numer = state.l0 * state.phi - g0 + np.sum(
        state.lam_n + state.rho_n[:, None, None] * state.phi_n, axis=0
    )
    phi_next = project(numer / (state.l0 + state.rho_n.sum()))
    if momentum > 0.0:
        phi_next = agd_extrapolate(phi_next, state.phi, momentum)

    rho_sel = state.rho_n[sel, None, None]
    lip_sel = state.l_n[sel, None, None]
    phi_n_next = state.phi_n.copy()
    phi_n_next[sel] = (
        lip_sel * state.phi_n[sel]
        + rho_sel * state.phi[None]
        - state.lam_n[sel]
        - g_sel
    ) / (lip_sel + rho_sel)
    lam_next = state.lam_n.copy()
    lam_next[sel] += rho_sel * (phi_n_next[sel] - state.phi[None])

    next_state = SolverState(
        algorithm="pdmm",
        phi=phi_next,
        phi_n=phi_n_next,
        lam_n=lam_next,
        rho_n=state.rho_n,
        l_n=state.l_n,
        block_lags=state.block_lags,
        t=state.t,
        l0=state.l0,
        k=state.k + 1,
    )

    report = residuals(state, next_state)
    f_obj, _ = ws.objective_grad(phi_next, with_grad=False)
    stack_next = np.concatenate([phi_next[None], phi_n_next], axis=0)
    f_next, _ = ws.objective_grad(stack_next, with_grad=False)
    diff = phi_n_next - phi_next[None]
    aug = float(
        f_next[0]
        + np.sum(
            f_next[1:]
            + np.sum(lam_next * diff, axis=(1, 2))
            + 0.5 * state.rho_n * np.sum(diff**2, axis=(1, 2))
        )
    )
    wall_ms = (time.perf_counter() - t0) * 1e3 if record_time else 0.0
    record = ConvergenceRecord(
        k=next_state.k,
        objective=float(f_obj.sum()),
        aug_lagrangian=aug,
        combined_residual=report.combined,
        consensus_gap=next_state.consensus_gap(),
        wall_ms=wall_ms,
    )
    return next_state, record, report


def solve_pdmm(
    n_len: int,
    m_count: int,
    t: LagSet,
    *,
    rho_multiplier: float = 9.0,
    epsilon: float = 1e-4,
    max_iter: int = 50_000,
    seed: int = 0,
    accel: AccelConfig | None = None,
    projection: str = "wrap",
    theory_checks: str = "report",
    lambda_init: str = "uniform",
    record_wall_time: bool = False,
) -> SolveResult:
    """Run consensus-PDMM; aborts with reason "diverged" if the objective
    exceeds 1e3 times its initial value (no convergence guarantee exists)."""
    _require_zero_lag(t)
    if theory_checks not in ("off", "report", "strict"):
        raise InvalidInputError(f"unknown theory_checks mode {theory_checks!r}")
    if theory_checks == "strict" and rho_multiplier < 9.0:
        raise InvalidInputError("strict theory mode requires rho_multiplier >= 9")
    if max_iter < 0:
        raise InvalidInputError("max_iter must be nonnegative")
    accel = accel or AccelConfig()
    project = projector(projection)
    streams = spawn_streams(seed)
    state = _init_state("pdmm", n_len, m_count, t, rho_multiplier, streams, lambda_init)
    theory = TheoryReport()
    if max_iter == 0:
        return SolveResult(project(state.phi), [], STOP_ITERATION_BUDGET, state, theory)

    ws = LagWorkspace(n_len, t.as_array())
    full_mask = np.ones(len(state.block_lags), dtype=bool)
    f_init, _ = ws.objective_grad(state.phi, with_grad=False)
    objective_init = float(f_init.sum())
    aug_prev = objective_init
    momentum = accel.agd_momentum if accel.agd_enabled else 0.0
    increase_streak = 0
    trace: list[ConvergenceRecord] = []
    stop = STOP_ITERATION_BUDGET

    for _ in range(max_iter):
        if accel.sbcd_enabled and len(state.block_lags) > 0:
            mask = sbcd_mask(state.block_lags, accel.sbcd_probability, streams["sbcd"])
        else:
            mask = full_mask
        state, record, report = _pdmm_step(
            state, ws, mask, project, momentum, record_wall_time
        )
        trace.append(record)
        if record.objective > DIVERGENCE_FACTOR * max(objective_init, 1e-300):
            stop = STOP_DIVERGED
            break
        if record.aug_lagrangian > aug_prev:
            increase_streak += 1
        else:
            increase_streak = 0
        if increase_streak >= 50:
            momentum = 0.0
            increase_streak = 0
        aug_prev = record.aug_lagrangian
        if termination_met(report, epsilon):
            stop = STOP_CONVERGED
            break

    return SolveResult(project(state.phi), trace, stop, state, theory)
