"""Acceleration strategies: stochastic lag-block sampling and extrapolation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import InvalidInputError, LagSet, shortest_angle, wrap_phase


@dataclass(frozen=True)
class AccelConfig:
    sbcd_enabled: bool = False
    sbcd_probability: float = 0.5
    agd_enabled: bool = False
    agd_momentum: float = 0.5

    def __post_init__(self):
        if not 0.0 < self.sbcd_probability <= 1.0:
            raise InvalidInputError("sbcd_probability must lie in (0, 1]")
        if not 0.0 <= self.agd_momentum < 1.0:
            raise InvalidInputError("agd_momentum must lie in [0, 1)")


def sbcd_select(t: LagSet, p: float, rng: np.random.Generator) -> LagSet:
    """Draw the subset of lag blocks to update this iteration.

    Each lag is kept independently with probability p; an empty draw is
    resampled so every iteration performs work.
    """
    if not 0.0 < p <= 1.0:
        raise InvalidInputError("selection probability must lie in (0, 1]")
    lags = t.as_array()
    while True:
        keep = rng.random(len(lags)) < p
        if keep.any():
            return LagSet(tuple(int(n) for n in lags[keep]))


def sbcd_mask(block_lags: np.ndarray, p: float, rng: np.random.Generator) -> np.ndarray:
    """Boolean per-block variant of sbcd_select used inside the solvers."""
    if not 0.0 < p <= 1.0:
        raise InvalidInputError("selection probability must lie in (0, 1]")
    while True:
        keep = rng.random(len(block_lags)) < p
        if keep.any():
            return keep


def agd_extrapolate(phi_k: np.ndarray, phi_prev: np.ndarray, omega: float) -> np.ndarray:
    """Heavy-ball extrapolation phi + omega * (phi - phi_prev), on the torus.

    The momentum direction uses the shortest signed angular difference per
    entry so a wrap across 0/2pi does not masquerade as a huge step.
    """
    phi_k = np.asarray(phi_k, dtype=float)
    phi_prev = np.asarray(phi_prev, dtype=float)
    if phi_k.shape != phi_prev.shape:
        raise InvalidInputError("phase matrices must share a shape")
    if not 0.0 <= omega < 1.0:
        raise InvalidInputError("momentum must lie in [0, 1)")
    return wrap_phase(phi_k + omega * shortest_angle(phi_k - phi_prev))
