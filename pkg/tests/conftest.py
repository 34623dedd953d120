from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest

from gsgp import Dataset, RunConfig, load_dataset

ROOT = Path(__file__).resolve().parents[1]
DATA_DIR = ROOT / "data"
YACHT_PATH = DATA_DIR / "yacht_hydrodynamics.data"
TOWER_PATH = DATA_DIR / "tower.txt"

MISSING_DATA_HINT = (
    "benchmark dataset not present under data/; "
    "run scripts/fetch_benchmarks.py on a machine with network access "
    "(see data/README.md for provenance)"
)


def small_cfg(**overrides) -> RunConfig:
    base = dict(
        population_size=16,
        random_trees=16,
        program_size=31,
        generations=10,
        seed=11,
        backend="sequential",
    )
    base.update(overrides)
    return RunConfig(**base)


def toy_dataset(n_cases: int = 24, n_features: int = 3, seed: int = 0) -> Dataset:
    """Small deterministic dataset with a smooth rational target."""
    rng = np.random.default_rng(seed)
    features = rng.uniform(-2.0, 2.0, size=(n_cases, n_features))
    target = features[:, 0] * features[:, 1] - features[:, 2 % n_features] + 0.5
    return Dataset(features, target)


@pytest.fixture(scope="session")
def yacht() -> Dataset:
    if not YACHT_PATH.exists():
        pytest.skip(MISSING_DATA_HINT)
    return load_dataset(YACHT_PATH)
