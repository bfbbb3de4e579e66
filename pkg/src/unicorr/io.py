"""Deterministic file outputs for design runs: CSVs and a summary JSON.

All CSV files use '.' decimals, LF line endings, and a header row; floats are
written with shortest round-trip repr so identical runs produce identical
bytes.  Negative infinity (an exactly-zero correlation residual) serializes
as the string "-inf".
"""

from __future__ import annotations

import json
import math
import os

import numpy as np


def _fmt(value: float) -> str:
    value = float(value)
    if math.isinf(value):
        return "-inf" if value < 0 else "inf"
    return repr(value)


def _write_lines(path: str, lines: list[str]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def write_phases_csv(path: str, phi: np.ndarray) -> None:
    m_count = phi.shape[1]
    lines = [",".join(f"seq_{m + 1}" for m in range(m_count))]
    lines += [",".join(_fmt(v) for v in row) for row in phi]
    _write_lines(path, lines)


def read_phases_csv(path: str) -> np.ndarray:
    with open(path, encoding="utf-8") as fh:
        rows = [line.strip() for line in fh if line.strip()]
    return np.array([[float(v) for v in row.split(",")] for row in rows[1:]])


def write_sequences_csv(path: str, x: np.ndarray) -> None:
    m_count = x.shape[1]
    header = []
    for m in range(m_count):
        header += [f"re_{m + 1}", f"im_{m + 1}"]
    lines = [",".join(header)]
    for row in x:
        cells = []
        for v in row:
            cells += [_fmt(v.real), _fmt(v.imag)]
        lines.append(",".join(cells))
    _write_lines(path, lines)


def write_trace_csv(path: str, trace) -> None:
    lines = ["k,objective,aug_lagrangian,combined_residual,consensus_gap,wall_ms"]
    for rec in trace:
        lines.append(
            ",".join(
                [
                    str(rec.k),
                    _fmt(rec.objective),
                    _fmt(rec.aug_lagrangian),
                    _fmt(rec.combined_residual),
                    _fmt(rec.consensus_gap),
                    _fmt(rec.wall_ms),
                ]
            )
        )
    _write_lines(path, lines)


def write_correlation_profile_csv(path: str, lags, levels) -> None:
    """Two-sided profile over the configured window, mirrored exactly.

    levels[i] corresponds to nonnegative lag lags[i]; the negative side
    reuses the identical formatted value since level(-n) = level(n).
    """
    rows: list[tuple[int, str]] = []
    for n, level in zip(lags, levels):
        cell = _fmt(level)
        rows.append((n, cell))
        if n != 0:
            rows.append((-n, cell))
    rows.sort(key=lambda item: item[0])
    lines = ["n,level_db"] + [f"{n},{cell}" for n, cell in rows]
    _write_lines(path, lines)


def _json_safe(obj):
    if isinstance(obj, dict):
        return {k: _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "-inf" if v < 0 else "inf"
        return v
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def write_summary_json(path: str, summary: dict) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(_json_safe(summary), fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_sweep_summary_csv(path: str, rows: list[dict]) -> None:
    header = ["seed", "stop_reason", "average_level_db", "min_level_db"]
    lines = [",".join(header)]
    for row in rows:
        lines.append(
            ",".join(
                [
                    str(row["seed"]),
                    str(row["stop_reason"]),
                    _fmt(row["average_level_db"]),
                    _fmt(row["min_level_db"]),
                ]
            )
        )
    _write_lines(path, lines)


def ensure_dir(path: str) -> None:
    os.makedirs(path, exist_ok=True)
