"""Shared solver state for the consensus ADMM/PDMM iterations."""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .core import InvalidInputError, LagSet

STOP_CONVERGED = "converged"
STOP_ITERATION_BUDGET = "iteration-budget"
STOP_DIVERGED = "diverged"


@dataclass
class SolverState:
    """All consensus variables at one iteration.

    ``phi`` is the global phase matrix; ``phi_n``/``lam_n`` stack one local
    copy and one multiplier per consensus block (one block per lag for ADMM;
    the zero lag has no block under PDMM, where it lives in the phi update).
    """

    algorithm: str            # "admm" | "pdmm"
    phi: np.ndarray           # (N, M)
    phi_n: np.ndarray         # (B, N, M)
    lam_n: np.ndarray         # (B, N, M)
    rho_n: np.ndarray         # (B,)
    l_n: np.ndarray           # (B,)
    block_lags: np.ndarray    # (B,) lags owning the blocks
    t: LagSet                 # full lag set of the run
    l0: float                 # Lipschitz constant used for the phi block
    k: int = 1

    def __post_init__(self):
        shape = self.phi.shape
        blocks = len(self.block_lags)
        if self.phi_n.shape != (blocks,) + shape or self.lam_n.shape != (blocks,) + shape:
            raise InvalidInputError("block stacks must share the phi shape")
        if self.rho_n.shape != (blocks,) or self.l_n.shape != (blocks,):
            raise InvalidInputError("need one rho and one Lipschitz constant per block")

    @property
    def n_len(self) -> int:
        return self.phi.shape[0]

    @property
    def m_count(self) -> int:
        return self.phi.shape[1]

    def consensus_gap(self) -> float:
        """max_n ||phi_n - phi||_F over the consensus blocks."""
        if len(self.block_lags) == 0:
            return 0.0
        diffs = self.phi_n - self.phi[None, :, :]
        return float(np.sqrt(np.max(np.sum(diffs**2, axis=(1, 2)))))

    def copy(self) -> "SolverState":
        return replace(
            self,
            phi=self.phi.copy(),
            phi_n=self.phi_n.copy(),
            lam_n=self.lam_n.copy(),
            rho_n=self.rho_n.copy(),
            l_n=self.l_n.copy(),
        )


def spawn_streams(seed: int) -> dict[str, np.random.Generator]:
    """Split one master seed into independent per-purpose generators.

    The split is fixed (child 0: initial phases, child 1: initial
    multipliers, child 2: SBCD draws) so toggling block sampling never
    perturbs the initialization.
    """
    children = np.random.SeedSequence(int(seed)).spawn(3)
    return {
        "phases": np.random.default_rng(children[0]),
        "multipliers": np.random.default_rng(children[1]),
        "sbcd": np.random.default_rng(children[2]),
    }
