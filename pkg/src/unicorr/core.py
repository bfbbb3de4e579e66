"""Phase matrices, unit-modulus sequence sets, and shift-correlation operators.

Conventions used throughout the package:

* a phase matrix is an N-by-M real array (radians); row index is the
  position within a sequence, column index selects the sequence,
* the sequence set is the elementwise complex exponential of the phases,
* the lag-n correlation between columns i and j sums products of the
  overlapping portion after shifting column j down by n positions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * np.pi


class InvalidLagError(ValueError):
    """Raised when a lag index falls outside [0, N-1]."""


class InvalidInputError(ValueError):
    """Raised for malformed numerical inputs (wrong shape, NaN, ...)."""


@dataclass(frozen=True)
class LagSet:
    """Ordered set of nonnegative lag indices under design control."""

    lags: tuple[int, ...]

    def __post_init__(self):
        lags = tuple(int(n) for n in self.lags)
        if len(lags) == 0:
            raise InvalidInputError("lag set must be nonempty")
        if any(n < 0 for n in lags):
            raise InvalidLagError("lags must be nonnegative")
        if any(b <= a for a, b in zip(lags, lags[1:])):
            raise InvalidInputError("lags must be strictly increasing")
        object.__setattr__(self, "lags", lags)

    @classmethod
    def from_range(cls, lo: int, hi: int) -> "LagSet":
        if lo > hi:
            raise InvalidInputError(f"empty lag range [{lo}, {hi}]")
        return cls(tuple(range(lo, hi + 1)))

    @property
    def include_zero(self) -> bool:
        return self.lags[0] == 0

    def __len__(self) -> int:
        return len(self.lags)

    def __iter__(self):
        return iter(self.lags)

    def validate_for_length(self, n_len: int) -> None:
        if self.lags[-1] > n_len - 1:
            raise InvalidLagError(
                f"largest lag {self.lags[-1]} exceeds N-1 = {n_len - 1}"
            )

    def as_array(self) -> np.ndarray:
        return np.asarray(self.lags, dtype=np.intp)


def check_phase_matrix(phi) -> np.ndarray:
    """Validate and return phases as a float N-by-M array, N >= 2, M >= 2."""
    phi = np.asarray(phi, dtype=float)
    if phi.ndim != 2:
        raise InvalidInputError(f"phase matrix must be 2-D, got shape {phi.shape}")
    n_len, m_count = phi.shape
    if n_len < 2 or m_count < 2:
        raise InvalidInputError(
            f"need N >= 2 and M >= 2 sequences, got N={n_len}, M={m_count}"
        )
    if not np.all(np.isfinite(phi)):
        raise InvalidInputError("phase matrix contains non-finite entries")
    return phi


def phases_to_sequences(phi: np.ndarray) -> np.ndarray:
    """Map phases to the unit-modulus complex sequence set, entrywise e^{j phi}."""
    phi = np.asarray(phi, dtype=float)
    if not np.all(np.isfinite(phi)):
        raise InvalidInputError("phase matrix contains non-finite entries")
    return np.exp(1j * phi)


def wrap_phase(phi: np.ndarray) -> np.ndarray:
    """Wrap every entry into [0, 2*pi); the represented phasor is unchanged."""
    phi = np.asarray(phi, dtype=float)
    if not np.all(np.isfinite(phi)):
        raise InvalidInputError("cannot wrap non-finite phases")
    out = np.mod(phi, TWO_PI)
    # mod can round a tiny negative input up to exactly 2*pi
    out[out >= TWO_PI] = 0.0
    return out


def clamp_phase(phi: np.ndarray) -> np.ndarray:
    """Box-project onto [0, 2*pi): the literal convex projection alternative."""
    phi = np.asarray(phi, dtype=float)
    if not np.all(np.isfinite(phi)):
        raise InvalidInputError("cannot clamp non-finite phases")
    return np.clip(phi, 0.0, np.nextafter(TWO_PI, 0.0))


def shortest_angle(delta: np.ndarray) -> np.ndarray:
    """Signed shortest angular representative of each entry, in (-pi, pi]."""
    d = np.mod(np.asarray(delta, dtype=float) + np.pi, TWO_PI) - np.pi
    d[d == -np.pi] = np.pi
    return d


def _check_lag(x: np.ndarray, n: int) -> None:
    n_len = x.shape[0]
    if not 0 <= n <= n_len - 1:
        raise InvalidLagError(f"lag {n} outside [0, {n_len - 1}]")


def shift_correlation(x: np.ndarray, n: int) -> np.ndarray:
    """Lag-n correlation matrix of the columns of x.

    Entry (i, j) is sum_{k=n+1}^{N} conj(x[k, i]) * x[k - n, j] (1-based k),
    i.e. the inner product of column i against column j shifted down by n.
    """
    x = np.asarray(x)
    _check_lag(x, n)
    if n == 0:
        return x.conj().T @ x
    return x[n:, :].conj().T @ x[:-n, :]


def negative_lag_correlation(x: np.ndarray, n: int) -> np.ndarray:
    """Correlation matrix at lag -n, the conjugate transpose of the lag-n one."""
    return shift_correlation(x, n).conj().T
