"""Self-contained verification suites: independent oracles for the gradient,
the shift-correlation operator, the Lipschitz bound, and the decrease and
lower-bound guarantees, runnable from the command line."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import LagSet, shift_correlation
from .admm import solve_admm
from .gradient import grad_fd_oracle, grad_fn, lipschitz_bound

_SIZES = {
    "small": dict(grad_samples=60, corr_samples=60, lip_pairs=200, n_max=16),
    "medium": dict(grad_samples=200, corr_samples=100, lip_pairs=1000, n_max=32),
}


@dataclass
class SuiteResult:
    name: str
    passed: bool
    detail: str


def brute_force_correlation(x: np.ndarray, n: int) -> np.ndarray:
    """Direct double loop over sequence pairs; the oracle for shift_correlation."""
    n_len, m_count = x.shape
    r = np.zeros((m_count, m_count), dtype=complex)
    for i in range(m_count):
        for j in range(m_count):
            acc = 0.0 + 0.0j
            for k in range(n, n_len):
                acc += np.conj(x[k, i]) * x[k - n, j]
            r[i, j] = acc
    return r


def verify_gradient(seed: int = 0, samples: int = 60, n_max: int = 16,
                    grad_impl=grad_fn) -> SuiteResult:
    """Analytic gradient against central finite differences."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(samples):
        n_len = int(rng.choice([4, 8, min(16, n_max)]))
        m_count = int(rng.choice([2, 3, 4]))
        n = int(rng.integers(0, n_len))
        phi = rng.uniform(0, 2 * np.pi, size=(n_len, m_count))
        g = grad_impl(phi, n)
        g_fd = grad_fd_oracle(phi, n)
        # floor the denominator: at n = N-1 the objective is constant, the
        # true gradient is zero, and the quotient would be pure FD noise
        rel = np.linalg.norm(g - g_fd) / max(np.linalg.norm(g_fd), 1e-2)
        worst = max(worst, rel)
    return SuiteResult(
        "gradient-vs-finite-differences",
        worst < 1e-5,
        f"worst relative error {worst:.3e} over {samples} samples (limit 1e-5)",
    )


def verify_correlation(seed: int = 0, samples: int = 60, n_max: int = 8) -> SuiteResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(samples):
        n_len = int(rng.integers(2, n_max + 1))
        m_count = int(rng.integers(2, 5))
        n = int(rng.integers(0, n_len))
        x = np.exp(1j * rng.uniform(0, 2 * np.pi, size=(n_len, m_count)))
        diff = np.abs(shift_correlation(x, n) - brute_force_correlation(x, n)).max()
        worst = max(worst, diff)
    return SuiteResult(
        "correlation-vs-brute-force",
        worst < 1e-12,
        f"worst entry deviation {worst:.3e} over {samples} instances (limit 1e-12)",
    )


def verify_lipschitz(seed: int = 0, pairs: int = 200, n_max: int = 32) -> SuiteResult:
    """Sampled gradient-difference ratios never exceed 4(M-1)(N+1)."""
    rng = np.random.default_rng(seed)
    worst_ratio = 0.0
    violations = 0
    for _ in range(pairs):
        n_len = int(rng.integers(4, n_max + 1))
        m_count = int(rng.integers(2, 5))
        n = int(rng.integers(0, n_len))
        bound = lipschitz_bound(n_len, m_count)
        a = rng.uniform(0, 2 * np.pi, size=(n_len, m_count))
        b = a + rng.normal(scale=rng.choice([1e-3, 0.1, 1.0]), size=a.shape)
        denom = np.linalg.norm(a - b)
        if denom < 1e-14:
            continue
        ratio = np.linalg.norm(grad_fn(a, n) - grad_fn(b, n)) / denom
        worst_ratio = max(worst_ratio, ratio / bound)
        if ratio > bound:
            violations += 1
    return SuiteResult(
        "lipschitz-bound-sampling",
        violations == 0,
        f"{violations} violations, worst ratio/bound {worst_ratio:.4f} over {pairs} pairs",
    )


def verify_lemmas(seed: int = 0, n_len: int = 16, iters: int = 300) -> SuiteResult:
    """Monotone and nonnegative augmented Lagrangian on a small seeded run."""
    res = solve_admm(
        n_len, 3, LagSet.from_range(0, 4),
        max_iter=iters, seed=seed, theory_checks="report",
    )
    values = np.array([r.aug_lagrangian for r in res.trace])
    slack = 1e-9 * (1.0 + np.abs(values[:-1]))
    monotone = bool(np.all(np.diff(values) <= slack))
    nonneg = bool(np.all(values >= -1e-9 * (1.0 + abs(values[0]))))
    return SuiteResult(
        "lagrangian-decrease-and-lower-bound",
        monotone and nonneg,
        f"monotone={monotone} nonnegative={nonneg} over {len(values)} iterations "
        f"({res.theory.total_violations} bound-check violations reported)",
    )


def run_suites(sizes: str = "small", seed: int = 0, grad_impl=grad_fn):
    if sizes not in _SIZES:
        raise ValueError(f"unknown sizes preset {sizes!r}")
    cfg = _SIZES[sizes]
    return [
        verify_gradient(seed, cfg["grad_samples"], cfg["n_max"], grad_impl),
        verify_correlation(seed, cfg["corr_samples"], min(cfg["n_max"], 8)),
        verify_lipschitz(seed, cfg["lip_pairs"], cfg["n_max"]),
        verify_lemmas(seed),
    ]


def format_report(results) -> str:
    width = max(len(r.name) for r in results)
    lines = []
    for r in results:
        mark = "PASS" if r.passed else "FAIL"
        lines.append(f"{r.name.ljust(width)}  {mark}  {r.detail}")
    return "\n".join(lines)
