"""Estimator-style wrappers around the two solvers.

The designers take no training data; fit() runs the configured solver and
exposes the designed waveforms as fitted attributes, keeping get_params /
set_params / clone interoperability with scikit-learn tooling.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator

from .accel import AccelConfig
from .admm import solve_admm
from .core import LagSet, phases_to_sequences
from .metrics import ccl, correlation_level_db, isl
from .pdmm import solve_pdmm


class _BaseDesigner(BaseEstimator):
    def __init__(self, n_len=64, m_count=2, lag_lo=0, lag_hi=None,
                 rho_multiplier=9.0, epsilon=1e-4, max_iter=50_000, seed=0,
                 sbcd_enabled=False, sbcd_probability=0.5,
                 agd_enabled=False, agd_momentum=0.5,
                 projection="wrap", theory_checks="report",
                 lambda_init="uniform"):
        self.n_len = n_len
        self.m_count = m_count
        self.lag_lo = lag_lo
        self.lag_hi = lag_hi
        self.rho_multiplier = rho_multiplier
        self.epsilon = epsilon
        self.max_iter = max_iter
        self.seed = seed
        self.sbcd_enabled = sbcd_enabled
        self.sbcd_probability = sbcd_probability
        self.agd_enabled = agd_enabled
        self.agd_momentum = agd_momentum
        self.projection = projection
        self.theory_checks = theory_checks
        self.lambda_init = lambda_init

    _solver = None  # set by subclasses

    def _lag_set(self) -> LagSet:
        hi = self.lag_hi if self.lag_hi is not None else min(39, self.n_len - 1)
        return LagSet.from_range(self.lag_lo, hi)

    def fit(self, X=None, y=None):
        """Run the solver; X and y are ignored (the problem has no data)."""
        t = self._lag_set()
        result = type(self)._solver(
            self.n_len, self.m_count, t,
            rho_multiplier=self.rho_multiplier,
            epsilon=self.epsilon,
            max_iter=self.max_iter,
            seed=self.seed,
            accel=AccelConfig(
                sbcd_enabled=self.sbcd_enabled,
                sbcd_probability=self.sbcd_probability,
                agd_enabled=self.agd_enabled,
                agd_momentum=self.agd_momentum,
            ),
            projection=self.projection,
            theory_checks=self.theory_checks,
            lambda_init=self.lambda_init,
        )
        self.phases_ = result.phi
        self.sequences_ = phases_to_sequences(result.phi)
        self.trace_ = result.trace
        self.stop_reason_ = result.stop_reason
        self.n_iter_ = len(result.trace)
        self.state_ = result.state
        self.theory_ = result.theory
        return self

    def predict(self, X=None):
        """Return the designed unit-modulus sequence set."""
        if not hasattr(self, "sequences_"):
            raise AttributeError("designer is not fitted; call fit() first")
        return self.sequences_

    def score(self, X=None, y=None):
        """Negated total sidelobe energy (higher is better)."""
        x = self.predict()
        t = self._lag_set()
        return -(isl(x, t) + ccl(x, t))

    def correlation_levels_db(self):
        """Per-lag correlation level in dB over the configured window."""
        x = self.predict()
        return np.array([correlation_level_db(x, n) for n in self._lag_set()])


class ConsensusADMMDesigner(_BaseDesigner):
    """Sequence-set designer running the alternating-direction solver."""

    _solver = staticmethod(solve_admm)


class ConsensusPDMMDesigner(_BaseDesigner):
    """Sequence-set designer running the parallel one-phase solver."""

    _solver = staticmethod(solve_pdmm)
