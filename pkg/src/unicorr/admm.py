"""Consensus-ADMM solver: global averaging step, parallel per-lag linearized
proximal steps, dual ascent, with the rho = 9L default penalty rule."""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .accel import AccelConfig, agd_extrapolate, sbcd_mask
from .core import (
    InvalidInputError,
    InvalidLagError,
    LagSet,
    clamp_phase,
    shortest_angle,
    wrap_phase,
)
from .diagnostics import (
    ConvergenceRecord,
    TheoryReport,
    TheoryViolationError,
    residuals,
    sufficient_decrease_coefficients,
    termination_met,
)
from .gradient import DegenerateModelError, LagWorkspace, grad_fn, lipschitz_bound
from .state import (
    STOP_CONVERGED,
    STOP_ITERATION_BUDGET,
    SolverState,
    spawn_streams,
)


@dataclass
class SolveResult:
    phi: np.ndarray
    trace: list[ConvergenceRecord]
    stop_reason: str
    state: SolverState
    theory: TheoryReport = field(default_factory=TheoryReport)


def projector(projection: str):
    if projection == "wrap":
        return wrap_phase
    if projection == "clamp":
        return clamp_phase
    raise InvalidInputError(f"unknown projection mode {projection!r}")


def _block_index(state: SolverState, n: int) -> int:
    hits = np.flatnonzero(state.block_lags == n)
    if len(hits) == 0:
        raise InvalidLagError(f"lag {n} has no consensus block in this state")
    return int(hits[0])


def _init_state(algorithm, n_len, m_count, t, rho_multiplier, streams, lambda_init):
    if m_count < 2:
        raise DegenerateModelError("need at least M = 2 sequences")
    if rho_multiplier <= 0:
        raise InvalidInputError("rho multiplier must be positive")
    t.validate_for_length(n_len)
    lags = t.as_array()
    block_lags = lags if algorithm == "admm" else lags[lags != 0]
    blocks = len(block_lags)
    lip = lipschitz_bound(n_len, m_count)
    phi = streams["phases"].uniform(0.0, 2.0 * np.pi, size=(n_len, m_count))
    if lambda_init == "uniform":
        lam = streams["multipliers"].uniform(-1.0, 1.0, size=(blocks, n_len, m_count))
    elif lambda_init == "zero":
        lam = np.zeros((blocks, n_len, m_count))
    else:
        raise InvalidInputError(f"unknown multiplier init {lambda_init!r}")
    l_n = np.full(blocks, lip)
    return SolverState(
        algorithm=algorithm,
        phi=phi,
        phi_n=np.tile(phi, (blocks, 1, 1)),
        lam_n=lam,
        rho_n=rho_multiplier * l_n,
        l_n=l_n,
        block_lags=block_lags,
        t=t,
        l0=lip,
        k=1,
    )


def admm_init(
    n_len: int,
    m_count: int,
    t: LagSet,
    rho_multiplier: float = 9.0,
    seed: int = 0,
    lambda_init: str = "uniform",
) -> SolverState:
    """Random initial state: phi uniform on [0, 2pi), multipliers uniform on
    [-1, 1] (small next to rho), every local copy equal to phi."""
    streams = spawn_streams(seed)
    return _init_state("admm", n_len, m_count, t, rho_multiplier, streams, lambda_init)


def admm_phi_update(state: SolverState, projection: str = "wrap") -> np.ndarray:
    """Global step: projected minimizer of the augmented Lagrangian in phi.

    With equal penalties this is the plain average of phi_n + lam_n/rho_n;
    with unequal penalties the exact weighted minimizer is used instead.
    """
    project = projector(projection)
    rho = state.rho_n
    if np.all(rho == rho[0]):
        avg = np.mean(state.phi_n + state.lam_n / rho[:, None, None], axis=0)
    else:
        avg = np.sum(rho[:, None, None] * state.phi_n + state.lam_n, axis=0) / rho.sum()
    return project(avg)


def admm_phin_update(state: SolverState, n: int, phi_next: np.ndarray) -> np.ndarray:
    """Per-lag step: phi_next - (grad f_n(phi_next) + lam_n) / (rho_n + L_n)."""
    b = _block_index(state, n)
    g = grad_fn(phi_next, n)
    return phi_next - (g + state.lam_n[b]) / (state.rho_n[b] + state.l_n[b])


def admm_dual_update(
    state: SolverState, n: int, phi_next: np.ndarray, phin_next: np.ndarray
) -> np.ndarray:
    """Dual ascent: lam_n + rho_n * (phi_n^{k+1} - phi^{k+1})."""
    b = _block_index(state, n)
    return state.lam_n[b] + state.rho_n[b] * (phin_next - phi_next)


def _admm_step(state, ws, mask, project, momentum, record_time):
    """One full iteration (S.1 then all S.2/S.3 pairs); returns the committed
    state, the trace record, and the new augmented Lagrangian value."""
    t0 = time.perf_counter() if record_time else 0.0

    rho = state.rho_n
    if np.all(rho == rho[0]):
        avg = np.mean(state.phi_n + state.lam_n / rho[:, None, None], axis=0)
    else:
        avg = np.sum(rho[:, None, None] * state.phi_n + state.lam_n, axis=0) / rho.sum()
    phi_next = project(avg)
    if momentum > 0.0:
        phi_next = agd_extrapolate(phi_next, state.phi, momentum)

    rows = np.flatnonzero(mask)
    f_all, g = ws.objective_grad(phi_next, grad_rows=rows)
    rho_sel = state.rho_n[rows, None, None]
    lip_sel = state.l_n[rows, None, None]
    phi_n_next = state.phi_n.copy()
    phi_n_next[rows] = phi_next[None] - (g + state.lam_n[rows]) / (rho_sel + lip_sel)
    lam_next = state.lam_n.copy()
    lam_next[rows] += rho_sel * (phi_n_next[rows] - phi_next[None])

    next_state = SolverState(
        algorithm="admm",
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
    f_blocks, _ = ws.objective_grad(phi_n_next, with_grad=False)
    diff = phi_n_next - phi_next[None]
    aug = float(
        np.sum(
            f_blocks
            + np.sum(lam_next * diff, axis=(1, 2))
            + 0.5 * state.rho_n * np.sum(diff**2, axis=(1, 2))
        )
    )
    wall_ms = (time.perf_counter() - t0) * 1e3 if record_time else 0.0
    record = ConvergenceRecord(
        k=next_state.k,
        objective=float(f_all.sum()),
        aug_lagrangian=aug,
        combined_residual=report.combined,
        consensus_gap=next_state.consensus_gap(),
        wall_ms=wall_ms,
    )
    return next_state, record, report


def _check_theory(theory, mode, state, prev_state, aug_prev, aug_next, aug_init_abs, k,
                  wrap_mode=True):
    """Sufficient-decrease and lower-bound runtime checks (report or raise).

    Under wrap projection the iterate differences are measured with shortest
    angular representatives: a wrap across the 0/2pi seam moves the stored
    numbers by ~2pi while leaving the represented point (and the Lagrangian)
    essentially unchanged, which would otherwise inflate the decrease bound.
    """
    rho = state.rho_n
    lip = state.l_n
    slack = 1e-9 * (1.0 + abs(aug_prev))
    c_bar, c_tilde = sufficient_decrease_coefficients(float(rho[0]), float(lip[0]))
    # the decrease bound presumes the multiplier-gradient identity, which the
    # dual update establishes only after the first iteration; an increase on
    # the very first step is expected for any multiplier initialization
    if c_bar >= 0 and c_tilde >= 0 and k > 2:
        dphi = state.phi - prev_state.phi
        dphin = state.phi_n - prev_state.phi_n
        if wrap_mode:
            dphi = shortest_angle(dphi)
            dphin = shortest_angle(dphin)
        dphi_sq = float(np.sum(dphi**2))
        dphin_sq = np.sum(dphin**2, axis=(1, 2))
        c_bars = rho**3 - 7 * rho**2 * lip - 8 * rho * lip**2 - 32 * lip**3
        c_tildes = rho**3 - 12 * rho * lip**2 - 48 * lip**3
        bound = float(
            np.sum((c_bars * dphin_sq + c_tildes * dphi_sq) / (2.0 * rho**2))
        )
        theory.sufficient_decrease_checks += 1
        gap = (aug_prev - aug_next) - (bound - slack)
        theory.worst_decrease_slack = min(theory.worst_decrease_slack, gap)
        if gap < 0:
            theory.sufficient_decrease_violations += 1
            theory.details.append(
                f"k={k}: decrease {aug_prev - aug_next:.3e} below bound {bound:.3e}"
            )
            if mode == "strict":
                raise TheoryViolationError(theory.details[-1])
    if np.all(rho > 5 * lip):
        theory.lower_bound_checks += 1
        if aug_next < -1e-9 * (1.0 + aug_init_abs):
            theory.lower_bound_violations += 1
            theory.details.append(f"k={k}: augmented Lagrangian {aug_next:.3e} < 0")
            if mode == "strict":
                raise TheoryViolationError(theory.details[-1])


def solve_admm(
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
    """Run the consensus-ADMM loop to the residual criterion or the budget."""
    if theory_checks not in ("off", "report", "strict"):
        raise InvalidInputError(f"unknown theory_checks mode {theory_checks!r}")
    if theory_checks == "strict" and rho_multiplier < 9.0:
        raise InvalidInputError("strict theory mode requires rho_multiplier >= 9")
    if max_iter < 0:
        raise InvalidInputError("max_iter must be nonnegative")
    accel = accel or AccelConfig()
    project = projector(projection)
    streams = spawn_streams(seed)
    state = _init_state("admm", n_len, m_count, t, rho_multiplier, streams, lambda_init)
    theory = TheoryReport()
    if max_iter == 0:
        return SolveResult(project(state.phi), [], STOP_ITERATION_BUDGET, state, theory)

    ws = LagWorkspace(n_len, t.as_array())
    full_mask = np.ones(len(state.block_lags), dtype=bool)
    f_init, _ = ws.objective_grad(state.phi, with_grad=False)
    aug_prev = float(f_init.sum())  # consensus holds at init, penalties vanish
    aug_init_abs = abs(aug_prev)
    momentum = accel.agd_momentum if accel.agd_enabled else 0.0
    increase_streak = 0
    trace: list[ConvergenceRecord] = []
    stop = STOP_ITERATION_BUDGET

    for _ in range(max_iter):
        if accel.sbcd_enabled:
            mask = sbcd_mask(state.block_lags, accel.sbcd_probability, streams["sbcd"])
        else:
            mask = full_mask
        prev_state = state
        state, record, report = _admm_step(
            state, ws, mask, project, momentum, record_wall_time
        )
        trace.append(record)
        if theory_checks != "off":
            _check_theory(
                theory, theory_checks, state, prev_state,
                aug_prev, record.aug_lagrangian, aug_init_abs, state.k,
                wrap_mode=(projection == "wrap"),
            )
        if record.aug_lagrangian > aug_prev:
            increase_streak += 1
        else:
            increase_streak = 0
        if increase_streak >= 50:
            momentum = 0.0  # monotone restart: extrapolation is a heuristic
            increase_streak = 0
        aug_prev = record.aug_lagrangian
        if termination_met(report, epsilon):
            stop = STOP_CONVERGED
            break

    return SolveResult(project(state.phi), trace, stop, state, theory)
