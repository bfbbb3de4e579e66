import numpy as np
import pytest

from unicorr.accel import AccelConfig
from unicorr.admm import (
    admm_dual_update,
    admm_init,
    admm_phi_update,
    admm_phin_update,
    solve_admm,
)
from unicorr.core import InvalidInputError, LagSet, TWO_PI, wrap_phase
from unicorr.diagnostics import TheoryViolationError
from unicorr.gradient import DegenerateModelError, grad_fn
from unicorr.state import STOP_CONVERGED, STOP_ITERATION_BUDGET


class TestInit:
    def test_deterministic(self):
        a = admm_init(8, 3, LagSet.from_range(0, 2), seed=21)
        b = admm_init(8, 3, LagSet.from_range(0, 2), seed=21)
        assert np.array_equal(a.phi, b.phi)
        assert np.array_equal(a.lam_n, b.lam_n)

    def test_rho_default_value(self):
        state = admm_init(256, 3, LagSet.from_range(0, 39), rho_multiplier=9.0)
        assert np.all(state.rho_n == 18504.0)

    def test_zero_consensus_gap(self):
        state = admm_init(16, 2, LagSet.from_range(0, 3), seed=2)
        assert state.consensus_gap() == 0.0

    def test_phase_range(self):
        state = admm_init(32, 4, LagSet.from_range(0, 5), seed=3)
        assert np.all(state.phi >= 0) and np.all(state.phi < TWO_PI)

    def test_multiplier_range_and_zero_switch(self):
        state = admm_init(16, 2, LagSet.from_range(0, 3), seed=4)
        assert np.all(np.abs(state.lam_n) <= 1.0)
        zero = admm_init(16, 2, LagSet.from_range(0, 3), seed=4, lambda_init="zero")
        assert np.all(zero.lam_n == 0.0)
        assert np.array_equal(zero.phi, state.phi)

    def test_one_block_per_lag(self):
        state = admm_init(16, 2, LagSet.from_range(0, 3), seed=0)
        assert list(state.block_lags) == [0, 1, 2, 3]

    def test_rejects_single_sequence(self):
        with pytest.raises(DegenerateModelError):
            admm_init(16, 1, LagSet((0,)))

    def test_rejects_bad_rho(self):
        with pytest.raises(InvalidInputError):
            admm_init(16, 2, LagSet((0,)), rho_multiplier=0.0)


class TestPhiUpdate:
    def test_fixed_point(self):
        state = admm_init(8, 2, LagSet.from_range(0, 2), seed=1, lambda_init="zero")
        assert np.allclose(admm_phi_update(state), wrap_phase(state.phi))

    def test_equal_rho_mean(self):
        state = admm_init(4, 2, LagSet((0, 1)), seed=0, lambda_init="zero")
        state.phi_n = np.stack(
            [np.zeros((4, 2)), np.full((4, 2), np.pi)], axis=0
        )
        assert np.allclose(admm_phi_update(state), np.pi / 2)

    def test_unequal_rho_weighted_minimizer(self):
        state = admm_init(4, 2, LagSet((0, 1)), seed=0, lambda_init="zero")
        state.phi_n = np.stack(
            [np.zeros((4, 2)), np.full((4, 2), np.pi)], axis=0
        )
        state.rho_n = np.array([1.0, 3.0])
        assert np.allclose(admm_phi_update(state), 3 * np.pi / 4)


class TestPhinUpdate:
    def test_zero_gradient_fixed_point(self):
        state = admm_init(4, 2, LagSet((0,)), seed=0, lambda_init="zero")
        phi_next = np.array(
            [[0.0, 0.0], [0.0, np.pi], [0.0, 0.0], [0.0, np.pi]]
        )
        assert np.linalg.norm(grad_fn(phi_next, 0)) < 1e-12
        assert np.allclose(admm_phin_update(state, 0, phi_next), phi_next)

    def test_matches_transcription(self):
        state = admm_init(8, 3, LagSet.from_range(0, 2), seed=17)
        phi_next = admm_phi_update(state)
        for b, n in enumerate(state.block_lags):
            n = int(n)
            expected = phi_next - (
                grad_fn(phi_next, n) + state.lam_n[b]
            ) / (state.rho_n[b] + state.l_n[b])
            assert np.array_equal(admm_phin_update(state, n, phi_next), expected)

    def test_unknown_lag(self):
        from unicorr.core import InvalidLagError

        state = admm_init(8, 2, LagSet((0, 1)), seed=0)
        with pytest.raises(InvalidLagError):
            admm_phin_update(state, 5, state.phi)


class TestDualUpdate:
    def test_no_gap_no_change(self):
        state = admm_init(8, 2, LagSet((0,)), seed=0)
        phi_next = state.phi.copy()
        out = admm_dual_update(state, 0, phi_next, phi_next)
        assert np.array_equal(out, state.lam_n[0])

    def test_arithmetic(self):
        state = admm_init(4, 2, LagSet((0,)), seed=0)
        state.rho_n = np.array([2.0])
        phi_next = state.phi
        out = admm_dual_update(state, 0, phi_next, phi_next + 0.5)
        assert np.allclose(out - state.lam_n[0], 1.0)


class TestSolve:
    def test_infinite_epsilon_converges_immediately(self):
        res = solve_admm(8, 2, LagSet((0, 1)), epsilon=float("inf"), max_iter=100)
        assert res.stop_reason == STOP_CONVERGED
        assert len(res.trace) == 1

    def test_zero_budget_returns_initial(self):
        res = solve_admm(8, 2, LagSet((0, 1)), max_iter=0, seed=5)
        state = admm_init(8, 2, LagSet((0, 1)), seed=5)
        assert res.stop_reason == STOP_ITERATION_BUDGET
        assert np.array_equal(res.phi, wrap_phase(state.phi))
        assert res.trace == []

    def test_deterministic_traces(self):
        a = solve_admm(16, 2, LagSet.from_range(0, 3), max_iter=50, seed=7)
        b = solve_admm(16, 2, LagSet.from_range(0, 3), max_iter=50, seed=7)
        assert [r.objective for r in a.trace] == [r.objective for r in b.trace]
        assert np.array_equal(a.phi, b.phi)

    def test_trace_iterations_increasing(self):
        res = solve_admm(8, 2, LagSet((0, 1)), max_iter=20, seed=1)
        ks = [r.k for r in res.trace]
        assert ks == sorted(ks) and len(set(ks)) == len(ks)

    def test_monotone_lagrangian_and_lower_bound(self):
        res = solve_admm(
            32, 3, LagSet.from_range(0, 9), max_iter=1000, seed=2,
            theory_checks="report",
        )
        values = np.array([r.aug_lagrangian for r in res.trace])
        slack = 1e-9 * (1.0 + np.abs(values[:-1]))
        assert np.all(np.diff(values) <= slack)
        assert np.all(values >= -1e-9 * (1 + abs(values[0])))

    def test_small_instance_converges(self, converged_admm):
        assert converged_admm.stop_reason == STOP_CONVERGED
        assert converged_admm.trace[-1].combined_residual <= 1e-4
        assert converged_admm.state.consensus_gap() < 1e-3

    def test_output_phases_in_range(self):
        res = solve_admm(8, 2, LagSet((0, 1)), max_iter=30, seed=3)
        assert np.all(res.phi >= 0) and np.all(res.phi < TWO_PI)

    def test_batched_step_matches_scalar_operations(self):
        t = LagSet.from_range(0, 2)
        state = admm_init(8, 3, t, seed=17)
        res = solve_admm(8, 3, t, seed=17, max_iter=1)
        phi_next = admm_phi_update(state)
        assert np.allclose(res.state.phi, phi_next, atol=1e-12)
        for b, n in enumerate(state.block_lags):
            n = int(n)
            phin_next = admm_phin_update(state, n, phi_next)
            assert np.allclose(res.state.phi_n[b], phin_next, atol=1e-12)
            lam_next = admm_dual_update(state, n, phi_next, phin_next)
            assert np.allclose(res.state.lam_n[b], lam_next, atol=1e-9)

    def test_strict_mode_requires_default_penalty(self):
        with pytest.raises(InvalidInputError):
            solve_admm(
                8, 2, LagSet((0, 1)), rho_multiplier=2.0, theory_checks="strict"
            )

    def test_small_penalty_reported_not_fatal(self):
        res = solve_admm(
            8, 2, LagSet((0, 1)), rho_multiplier=2.0, max_iter=200,
            theory_checks="report",
        )
        assert res.stop_reason in (STOP_CONVERGED, STOP_ITERATION_BUDGET)

    def test_strict_mode_runs_clean_at_default(self):
        res = solve_admm(
            16, 2, LagSet.from_range(0, 2), max_iter=300, seed=11,
            theory_checks="strict", projection="wrap",
        )
        assert res.theory.total_violations == 0

    def test_clamp_projection_mode(self):
        res = solve_admm(
            8, 2, LagSet((0, 1)), max_iter=100, seed=4, projection="clamp"
        )
        assert np.all(res.phi >= 0) and np.all(res.phi < TWO_PI)

    def test_negative_max_iter_rejected(self):
        with pytest.raises(InvalidInputError):
            solve_admm(8, 2, LagSet((0, 1)), max_iter=-1)

    def test_theory_mode_validated(self):
        with pytest.raises(InvalidInputError):
            solve_admm(8, 2, LagSet((0, 1)), theory_checks="sometimes")
