"""Analytic gradients of the per-lag objectives, their Lipschitz bound, and a
finite-difference oracle.

The per-lag objective at lag n is the squared Frobenius norm of
E_n = X^H S_n X - N*I*delta_n with X = e^{j Phi}.  Differentiating through a
single phase phi_{i,m} touches only row m and column m of the correlation
matrix, which reduces each gradient to two small matrix products:

    Y = X E_n^H,  Z = X E_n,
    G[i, m] = -2 Im( X[i, m] * conj(Z[i+n, m]) - conj(X[i, m]) * Y[i-n, m] ),

with out-of-range shifted indices contributing zero.  This is O(M^2 N) per
lag.  The batched entry point evaluates a whole stack of (phase matrix, lag)
pairs at once, which is what the solvers drive every iteration.
"""

from __future__ import annotations

import numpy as np

from .core import InvalidInputError, InvalidLagError, LagSet, check_phase_matrix
from .metrics import objective_fn


class DegenerateModelError(ValueError):
    """Single-sequence design (M = 1) has no valid Lipschitz constant here."""


def lipschitz_bound(n_len: int, m_count: int) -> float:
    """Lipschitz constant 4*(M-1)*(N+1) shared by every per-lag gradient."""
    if m_count < 2:
        raise DegenerateModelError("need at least M = 2 sequences")
    if n_len < 2:
        raise InvalidInputError("need sequence length N >= 2")
    return 4.0 * (m_count - 1) * (n_len + 1)


class LagWorkspace:
    """Precomputed shift indices/masks for a fixed (N, lag list) pair.

    Shifting by a different lag per batch entry is done with one
    take_along_axis gather instead of per-lag slicing.
    """

    def __init__(self, n_len: int, lags: np.ndarray):
        lags = np.asarray(lags, dtype=np.intp)
        if lags.ndim != 1:
            raise InvalidInputError("lags must be a 1-D array")
        if np.any(lags < 0) or np.any(lags > n_len - 1):
            raise InvalidLagError(f"lags must lie in [0, {n_len - 1}]")
        self.n_len = int(n_len)
        self.lags = lags
        rows = np.arange(n_len, dtype=np.intp)[None, :]
        down = rows - lags[:, None]
        up = rows + lags[:, None]
        self._down_idx = np.clip(down, 0, n_len - 1)[:, :, None]
        self._down_mask = (down >= 0)[:, :, None]
        self._up_idx = np.clip(up, 0, n_len - 1)[:, :, None]
        self._up_mask = (up <= n_len - 1)[:, :, None]
        self._zero_lag = lags == 0

    @staticmethod
    def _shift(a: np.ndarray, idx: np.ndarray, mask: np.ndarray) -> np.ndarray:
        return np.take_along_axis(a, idx, axis=1) * mask

    def objective_grad(self, phi_stack: np.ndarray, with_grad: bool = True,
                       grad_rows: np.ndarray | None = None):
        """Objectives (and gradients) for stacked phases, one per lag.

        phi_stack has shape (B, N, M) or (N, M); a 2-D input is broadcast so
        every lag is evaluated at the same point.  Returns (f, G) with f of
        shape (B,).  G covers all rows by default, only the rows listed in
        grad_rows otherwise (the block-sampling path), and is None when
        with_grad=False.
        """
        phi_stack = np.asarray(phi_stack, dtype=float)
        batch = len(self.lags)
        if phi_stack.ndim == 2:
            # shared evaluation point: exponentiate once, broadcast the view
            if phi_stack.shape[0] != self.n_len:
                raise InvalidInputError(
                    f"expected phases of shape ({self.n_len}, M), "
                    f"got {phi_stack.shape}"
                )
            x = np.broadcast_to(
                np.exp(1j * phi_stack), (batch,) + phi_stack.shape
            )
        else:
            if phi_stack.shape[0] != batch or phi_stack.shape[1] != self.n_len:
                raise InvalidInputError(
                    f"expected stack of shape ({batch}, {self.n_len}, M), "
                    f"got {phi_stack.shape}"
                )
            x = np.exp(1j * phi_stack)
        m_count = x.shape[2]
        xs = self._shift(x, self._down_idx, self._down_mask)
        e = np.matmul(x.conj().transpose(0, 2, 1), xs)
        e[self._zero_lag] -= self.n_len * np.eye(m_count)
        f = np.sum(np.abs(e) ** 2, axis=(1, 2))
        if not with_grad:
            return f, None
        if grad_rows is None:
            xg, eg = x, e
            down_idx, down_mask = self._down_idx, self._down_mask
            up_idx, up_mask = self._up_idx, self._up_mask
        else:
            xg, eg = x[grad_rows], e[grad_rows]
            down_idx, down_mask = self._down_idx[grad_rows], self._down_mask[grad_rows]
            up_idx, up_mask = self._up_idx[grad_rows], self._up_mask[grad_rows]
        y = np.matmul(xg, eg.conj().transpose(0, 2, 1))
        z = np.matmul(xg, eg)
        t1 = xg.conj() * self._shift(y, down_idx, down_mask)
        t2 = xg * self._shift(z, up_idx, up_mask).conj()
        g = -2.0 * np.imag(t2 - t1)
        return f, g


def grad_fn(phi: np.ndarray, n: int) -> np.ndarray:
    """Analytic gradient of the lag-n objective with respect to the phases."""
    phi = check_phase_matrix(phi)
    n_len, m_count = phi.shape
    if m_count < 2:
        raise DegenerateModelError("need at least M = 2 sequences")
    if not 0 <= n <= n_len - 1:
        raise InvalidLagError(f"lag {n} outside [0, {n_len - 1}]")
    ws = LagWorkspace(n_len, np.array([n]))
    _, g = ws.objective_grad(phi[None, :, :])
    return g[0]


def grad_fd_oracle(phi: np.ndarray, n: int, h: float = 1e-6) -> np.ndarray:
    """Central finite-difference gradient of the lag-n objective.

    Deliberately routed through the scalar objective only, so it stays an
    independent check of the analytic path.
    """
    if not 1e-8 <= h <= 1e-3:
        raise InvalidInputError(f"step h={h} outside [1e-8, 1e-3]")
    phi = check_phase_matrix(phi)
    t = LagSet((n,))
    g = np.zeros_like(phi)
    for i in range(phi.shape[0]):
        for m in range(phi.shape[1]):
            bumped = phi.copy()
            bumped[i, m] = phi[i, m] + h
            f_plus = objective_fn(bumped, n, t)
            bumped[i, m] = phi[i, m] - h
            f_minus = objective_fn(bumped, n, t)
            g[i, m] = (f_plus - f_minus) / (2.0 * h)
    return g


def sum_gradient(phi: np.ndarray, t: LagSet) -> np.ndarray:
    """Gradient of the total objective: sum of grad_fn over the lag set."""
    phi = check_phase_matrix(phi)
    ws = LagWorkspace(phi.shape[0], t.as_array())
    _, g = ws.objective_grad(phi)
    return g.sum(axis=0)
