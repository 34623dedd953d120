"""RMSE fitness of semantic rows against the target vector."""

from __future__ import annotations

import numpy as np

from .backend import SequentialBackend
from .core import ConfigError, WORST_FITNESS


def rmse(row, target) -> float:
    """Root mean squared error with a fixed left-to-right accumulation.

    A non-finite accumulation (overflowing squares) yields the sentinel
    worst fitness instead of propagating NaN into survival.
    """
    row = np.asarray(row, dtype=np.float64)
    target = np.asarray(target, dtype=np.float64)
    if row.shape != target.shape or row.ndim != 1 or row.shape[0] == 0:
        raise ConfigError("rmse needs two equal-length nonempty vectors")
    with np.errstate(all="ignore"):
        diff = row - target
        total = np.cumsum(diff * diff)[-1]
        value = float(np.sqrt(total / row.shape[0]))
    return value if np.isfinite(value) else WORST_FITNESS


def compute_fitness(semantics: np.ndarray, target, backend: SequentialBackend | None = None) -> np.ndarray:
    """Fitness vector: entry i is ``rmse(row i, target)``.

    Each row reduction runs inside a single task in the same left-to-right
    order as the scalar ``rmse``, so the result is bitwise identical for
    every backend and worker count.
    """
    target = np.asarray(target, dtype=np.float64)
    if semantics.ndim != 2 or semantics.shape[1] != target.shape[0]:
        raise ConfigError(
            f"semantics columns ({semantics.shape}) must match target length ({target.shape[0]})"
        )
    m, n = semantics.shape
    out = np.empty(m, dtype=np.float64)

    def block(lo: int, hi: int) -> None:
        with np.errstate(all="ignore"):
            diff = semantics[lo:hi] - target
            totals = np.cumsum(diff * diff, axis=1)[:, -1]
            values = np.sqrt(totals / n)
            out[lo:hi] = np.where(np.isfinite(values), values, WORST_FITNESS)

    (backend or SequentialBackend()).map_row_blocks(m, block)
    return out
