"""Geometric semantic mutation on semantic matrices.

Offspring semantics is an elementwise affine perturbation of the parent:

    offspring[i, j] = parent[i, j] + ms[i] * (sig(R[u[i], j]) -/+ sig(R[v[i], j]))

where ``sig`` squashes raw random-tree semantics into (0, 1).  The tree
indices and mutation steps come from a per-generation plan drawn up front,
so the operator itself is a pure elementwise map that any backend may
partition freely.  The default combines the two squashed trees with a
difference, which makes the perturbation zero-mean; the additive variant
is kept selectable via ``RunConfig.gsm_sign``.
"""

from __future__ import annotations

import numpy as np

from . import rng
from .backend import SequentialBackend
from .core import ConfigError, MutationPlan, RunConfig, RunStats, ensure_finite_matrix

_DRAWS_PER_SLOT = 3  # u, v, ms


def sigmoid(x: float) -> float:
    """1 / (1 + e^-x); saturates to exactly 0.0 / 1.0 in the float tails."""
    with np.errstate(all="ignore"):
        return float(1.0 / (1.0 + np.exp(-np.float64(x))))


def sigmoid_array(x: np.ndarray) -> np.ndarray:
    with np.errstate(all="ignore"):
        return 1.0 / (1.0 + np.exp(-x))


def build_mutation_plan(m: int, r: int, cfg: RunConfig, generation: int) -> MutationPlan:
    """Random-tree index pairs and mutation steps for one generation.

    Slot i draws at counters 3i..3i+2 of the generation's stream, so the
    plan does not depend on how the mutation work is later partitioned.
    Index pairs are uniform over distinct pairs in [0, r).
    """
    if r < 2:
        raise ConfigError("geometric semantic mutation needs at least 2 random trees")
    if m < 1:
        raise ConfigError("plan length must be >= 1")
    stream = rng.PLAN_STREAM_BASE + generation
    slots = np.arange(m, dtype=np.uint64) * np.uint64(_DRAWS_PER_SLOT)
    d_u = rng.uniform_array(cfg.seed, stream, slots)
    d_v = rng.uniform_array(cfg.seed, stream, slots + np.uint64(1))

    u = np.minimum((d_u * r).astype(np.int64), r - 1)
    v = np.minimum((d_v * (r - 1)).astype(np.int64), r - 2)
    v = v + (v >= u)  # distinct by construction, still uniform

    if cfg.mutation_step == "uniform":
        d_ms = rng.uniform_array(cfg.seed, stream, slots + np.uint64(2))
        ms = 1.0 - d_ms  # uniform on (0, 1]
    else:
        ms = np.full(m, float(cfg.mutation_step))
    return MutationPlan(u, v, ms)


def _gsm_squashed(parent: np.ndarray, squashed_trees: np.ndarray, plan: MutationPlan,
                  sign: str, backend: SequentialBackend | None,
                  stats: RunStats | None) -> np.ndarray:
    """GSM given already-squashed tree semantics (the hot inner path)."""
    if parent.shape[1] != squashed_trees.shape[1]:
        raise ConfigError("parent and random-tree matrices must share the case axis")
    if len(plan) != parent.shape[0]:
        raise ConfigError("plan length must equal the population size")
    plan.validate(squashed_trees.shape[0])
    out = np.empty_like(parent)
    subtract = sign == "minus"

    def block(lo: int, hi: int) -> None:
        with np.errstate(all="ignore"):
            r_u = squashed_trees[plan.u[lo:hi]]
            r_v = squashed_trees[plan.v[lo:hi]]
            delta = r_u - r_v if subtract else r_u + r_v
            np.multiply(delta, plan.ms[lo:hi, None], out=delta)
            np.add(parent[lo:hi], delta, out=out[lo:hi])

    (backend or SequentialBackend()).map_row_blocks(parent.shape[0], block)
    return ensure_finite_matrix(out, stats)


def gsm(parent_semantics: np.ndarray, tree_semantics: np.ndarray, plan: MutationPlan,
        cfg: RunConfig, backend: SequentialBackend | None = None,
        stats: RunStats | None = None) -> np.ndarray:
    """Mutate every parent row; offspring slot i derives from parent i."""
    return _gsm_squashed(parent_semantics, sigmoid_array(tree_semantics), plan,
                         cfg.gsm_sign, backend, stats)


def gsm_paired(parent_train: np.ndarray, parent_test: np.ndarray,
               tree_train: np.ndarray, tree_test: np.ndarray,
               plan: MutationPlan, cfg: RunConfig,
               backend: SequentialBackend | None = None,
               stats: RunStats | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Apply one plan to the train and test sides of the same individuals.

    Keeping the plan shared is what lets the per-generation output report
    the test error of the semantically same elite that was selected on the
    training side.
    """
    if parent_train.shape[0] != parent_test.shape[0]:
        raise ConfigError("train and test parent matrices must have equal row counts")
    if tree_train.shape[0] != tree_test.shape[0]:
        raise ConfigError("train and test tree matrices must have equal row counts")
    return (
        gsm(parent_train, tree_train, plan, cfg, backend, stats),
        gsm(parent_test, tree_test, plan, cfg, backend, stats),
    )
