"""Run configuration: a flat JSON object with defaults and validation."""

from __future__ import annotations

import json
from dataclasses import dataclass, fields

from .accel import AccelConfig
from .core import InvalidInputError, LagSet


class ConfigError(ValueError):
    """Invalid run configuration; the message names the offending key."""


_DEFAULT_LAG_HI = 39  # capped at n_len - 1 when left unset


@dataclass
class RunConfig:
    n_len: int
    m_count: int
    lag_lo: int = 0
    lag_hi: int | None = None
    algorithm: str = "admm"
    rho_multiplier: float = 9.0
    epsilon: float = 1e-4
    max_iter: int = 50_000
    seed: int = 0
    sbcd_enabled: bool = False
    sbcd_probability: float = 0.5
    agd_enabled: bool = False
    agd_momentum: float = 0.5
    projection: str = "wrap"
    theory_checks: str = "report"
    lambda_init: str = "uniform"
    record_wall_time: bool = False
    output_dir: str = "unicorr_out"

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        if self.n_len < 2:
            raise ConfigError("n_len: need sequence length >= 2")
        if self.m_count < 2:
            raise ConfigError("m_count: need at least 2 sequences")
        if self.lag_hi is None:
            self.lag_hi = min(_DEFAULT_LAG_HI, self.n_len - 1)
        if not 0 <= self.lag_lo <= self.lag_hi:
            raise ConfigError(
                f"lag_lo: need 0 <= lag_lo ({self.lag_lo}) <= lag_hi ({self.lag_hi})"
            )
        if self.lag_hi > self.n_len - 1:
            raise ConfigError(
                f"lag_hi: {self.lag_hi} exceeds n_len - 1 = {self.n_len - 1}"
            )
        if self.algorithm not in ("admm", "pdmm"):
            raise ConfigError(f"algorithm: unknown value {self.algorithm!r}")
        if self.algorithm == "pdmm" and self.lag_lo != 0:
            raise ConfigError("lag_lo: pdmm requires lag_lo = 0")
        if self.rho_multiplier <= 0:
            raise ConfigError("rho_multiplier: must be positive")
        if self.epsilon <= 0:
            raise ConfigError("epsilon: must be positive")
        if self.max_iter < 0:
            raise ConfigError("max_iter: must be nonnegative")
        if not 0.0 < self.sbcd_probability <= 1.0:
            raise ConfigError("sbcd_probability: must lie in (0, 1]")
        if not 0.0 <= self.agd_momentum < 1.0:
            raise ConfigError("agd_momentum: must lie in [0, 1)")
        if self.projection not in ("wrap", "clamp"):
            raise ConfigError(f"projection: unknown value {self.projection!r}")
        if self.theory_checks not in ("off", "report", "strict"):
            raise ConfigError(f"theory_checks: unknown value {self.theory_checks!r}")
        if self.lambda_init not in ("uniform", "zero"):
            raise ConfigError(f"lambda_init: unknown value {self.lambda_init!r}")

    @property
    def lag_set(self) -> LagSet:
        return LagSet.from_range(self.lag_lo, self.lag_hi)

    @property
    def accel(self) -> AccelConfig:
        return AccelConfig(
            sbcd_enabled=self.sbcd_enabled,
            sbcd_probability=self.sbcd_probability,
            agd_enabled=self.agd_enabled,
            agd_momentum=self.agd_momentum,
        )

    def solver_kwargs(self) -> dict:
        return dict(
            rho_multiplier=self.rho_multiplier,
            epsilon=self.epsilon,
            max_iter=self.max_iter,
            seed=self.seed,
            accel=self.accel,
            projection=self.projection,
            theory_checks=self.theory_checks,
            lambda_init=self.lambda_init,
            record_wall_time=self.record_wall_time,
        )

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


_TYPES = {
    "n_len": int,
    "m_count": int,
    "lag_lo": int,
    "lag_hi": int,
    "algorithm": str,
    "rho_multiplier": float,
    "epsilon": float,
    "max_iter": int,
    "seed": int,
    "sbcd_enabled": bool,
    "sbcd_probability": float,
    "agd_enabled": bool,
    "agd_momentum": float,
    "projection": str,
    "theory_checks": str,
    "lambda_init": str,
    "record_wall_time": bool,
    "output_dir": str,
}


def parse_config(source: str, overrides: dict | None = None) -> RunConfig:
    """Parse a flat JSON object into a validated RunConfig.

    Unknown keys and type mismatches are rejected with the key named in the
    error; overrides (from CLI flags) take precedence over file values.
    """
    try:
        raw = json.loads(source) if source.strip() else {}
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config must be a flat JSON object")
    merged = dict(raw)
    for key, value in (overrides or {}).items():
        if value is not None:
            merged[key] = value

    clean: dict = {}
    for key, value in merged.items():
        if key not in _TYPES:
            raise ConfigError(f"{key}: unknown configuration key")
        want = _TYPES[key]
        if want is float and isinstance(value, int) and not isinstance(value, bool):
            value = float(value)
        if want is int and isinstance(value, bool):
            raise ConfigError(f"{key}: expected {want.__name__}, got bool")
        if not isinstance(value, want):
            raise ConfigError(
                f"{key}: expected {want.__name__}, got {type(value).__name__}"
            )
        clean[key] = value

    for required in ("n_len", "m_count"):
        if required not in clean:
            raise ConfigError(f"{required}: required key is missing")
    try:
        return RunConfig(**clean)
    except InvalidInputError as exc:
        raise ConfigError(str(exc)) from exc
