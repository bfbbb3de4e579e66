"""Correlation metrics: ISL, CCL, per-lag objective terms, and the dB level."""

from __future__ import annotations

import numpy as np

from .core import (
    InvalidLagError,
    LagSet,
    check_phase_matrix,
    phases_to_sequences,
    shift_correlation,
)


def isl(x: np.ndarray, t: LagSet) -> float:
    """Integrated sidelobe level: sum of |r_iin|^2 over nonzero lags in t."""
    x = np.asarray(x)
    t.validate_for_length(x.shape[0])
    total = 0.0
    for n in t:
        if n == 0:
            continue
        r = shift_correlation(x, n)
        total += float(np.sum(np.abs(np.diag(r)) ** 2))
    return total


def ccl(x: np.ndarray, t: LagSet) -> float:
    """Cross-correlation level: sum of |r_ijn|^2 over ordered pairs i != j, n in t."""
    x = np.asarray(x)
    t.validate_for_length(x.shape[0])
    total = 0.0
    for n in t:
        r = shift_correlation(x, n)
        off = r - np.diag(np.diag(r))
        total += float(np.sum(np.abs(off) ** 2))
    return total


def _residual_matrix(x: np.ndarray, n: int) -> np.ndarray:
    r = shift_correlation(x, n)
    if n == 0:
        r = r - x.shape[0] * np.eye(x.shape[1])
    return r


def objective_fn(phi: np.ndarray, n: int, t: LagSet) -> float:
    """Per-lag objective: squared Frobenius distance of the lag-n correlation
    matrix from its ideal value (N*I at lag 0, zero elsewhere)."""
    if n not in set(t):
        raise InvalidLagError(f"lag {n} not in the configured lag set")
    phi = check_phase_matrix(phi)
    x = phases_to_sequences(phi)
    e = _residual_matrix(x, n)
    return float(np.sum(np.abs(e) ** 2))


def objective_total(phi: np.ndarray, t: LagSet) -> float:
    """Sum of the per-lag objective terms over the whole lag set."""
    phi = check_phase_matrix(phi)
    t.validate_for_length(phi.shape[0])
    x = phases_to_sequences(phi)
    return float(
        sum(np.sum(np.abs(_residual_matrix(x, n)) ** 2) for n in t)
    )


def correlation_level_db(x: np.ndarray, n: int) -> float:
    """Correlation level in dB: 20*log10(||R_n - N*I*delta_n||_F^2 / (M*N^2)).

    Returns -inf when the residual norm is exactly zero.
    """
    x = np.asarray(x)
    n_len, m_count = x.shape
    e = _residual_matrix(x, n)
    sq = float(np.sum(np.abs(e) ** 2))
    if sq == 0.0:
        return float("-inf")
    return 20.0 * np.log10(sq / (m_count * n_len**2))
