"""Stage-level timing and scaling measurements.

Timings come from the monotonic host clock that the engine records around
each stage; instrumentation never touches the math, so timed and untimed
runs produce identical traces.  Sweeps execute their cells serially to
keep measurements from interfering with each other.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import rng
from .core import Dataset, GsgpError, RunConfig, StageTimings

HARNESS_STREAM = 1 << 34

CSV_COLUMNS = ("m", "n", "k", "backend", "workers", "stage", "millis")

_STAGES = (
    ("create_population", "create_population_ms"),
    ("compute_semantics", "compute_semantics_ms"),
    ("generation", "per_generation_ms"),
    ("total", "total_ms"),
)


def make_benchmark_dataset(n_cases: int, n_features: int, seed: int = 1) -> Dataset:
    """Deterministic synthetic regression data for timing runs."""
    draws = rng.uniform_array(seed, HARNESS_STREAM, np.arange(n_cases * n_features))
    features = draws.reshape(n_cases, n_features) * 2.0 - 1.0
    target = features[:, 0] * features[:, 1 % n_features] + features.sum(axis=1)
    return Dataset(features, target)


def _effective_workers(cfg: RunConfig) -> int:
    if cfg.backend == "sequential":
        return 1
    return cfg.threads if cfg.threads > 0 else (os.cpu_count() or 1)


def timing_rows(cfg: RunConfig, n_cases: int, timings: StageTimings) -> list[dict]:
    """Flatten one run's timings into CSV rows."""
    base = {
        "m": cfg.population_size,
        "n": n_cases,
        "k": cfg.program_size,
        "backend": cfg.backend,
        "workers": _effective_workers(cfg),
    }
    return [
        {**base, "stage": stage, "millis": getattr(timings, attr)}
        for stage, attr in _STAGES
    ]


def write_timing_csv(path, rows: list[dict]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS)
        writer.writeheader()
        writer.writerows(rows)


def timed_run(cfg: RunConfig, train, test):
    """One evolutionary run with a total time that includes dataset loading.

    ``train``/``test`` may be Dataset objects or paths; paths are loaded
    inside the total-time window, mirroring a real invocation.
    """
    from .evolution import run_evolution
    from .io_cli import load_dataset

    t0 = time.perf_counter()
    if not isinstance(train, Dataset):
        train = load_dataset(train)
    if not isinstance(test, Dataset):
        test = load_dataset(test)
    result = run_evolution(cfg, train, test)
    total_ms = (time.perf_counter() - t0) * 1e3
    result.timings = dataclasses.replace(result.timings, total_ms=total_ms)
    return result


def sweep(cells: list[dict], *, generations: int = 1, random_trees: int = 2,
          n_features: int = 8, n_test_cases: int = 16, seed: int = 1) -> list[dict]:
    """Run one timed cell per grid entry and collect CSV rows.

    Each cell is a dict with keys ``m``, ``n``, ``k``, ``backend`` and
    optionally ``workers``.  A failing cell is recorded with stage
    ``error`` and the sweep continues.
    """
    rows: list[dict] = []
    for cell in cells:
        try:
            cfg = RunConfig(
                population_size=cell["m"],
                random_trees=random_trees,
                program_size=cell["k"],
                generations=generations,
                seed=seed,
                backend=cell["backend"],
                threads=cell.get("workers", 0),
            )
            train = make_benchmark_dataset(cell["n"], n_features, seed)
            test = make_benchmark_dataset(n_test_cases, n_features, seed + 1)
            result = timed_run(cfg, train, test)
            rows.extend(timing_rows(cfg, cell["n"], result.timings))
        except (GsgpError, MemoryError) as exc:
            rows.append({
                "m": cell["m"], "n": cell["n"], "k": cell["k"],
                "backend": cell["backend"], "workers": cell.get("workers", 0),
                "stage": "error", "millis": -1.0,
            })
            print(f"sweep cell {cell} failed: {exc}", file=sys.stderr)
    return rows


def _int_list(raw: str) -> list[int]:
    return [int(tok) for tok in raw.split(",")]


def main() -> None:
    parser = argparse.ArgumentParser(
        prog="gsgp-bench",
        description="Timing sweep over population size, fitness cases and program size.",
    )
    parser.add_argument("--m", type=_int_list, default=[256], help="population sizes, comma separated")
    parser.add_argument("--n", type=_int_list, default=[1024], help="fitness-case counts")
    parser.add_argument("--k", type=_int_list, default=[127], help="program sizes")
    parser.add_argument("--backend", default="sequential", help="backends, comma separated")
    parser.add_argument("--workers", type=int, default=0, help="worker hint for the threads backend")
    parser.add_argument("--generations", type=int, default=1)
    parser.add_argument("--out", default="sweep.csv", help="output CSV path")
    args = parser.parse_args()

    cells = [
        {"m": m, "n": n, "k": k, "backend": b, "workers": args.workers}
        for m in args.m for n in args.n for k in args.k
        for b in args.backend.split(",")
    ]
    rows = sweep(cells, generations=args.generations)
    write_timing_csv(Path(args.out), rows)
    print(f"wrote {len(rows)} rows to {args.out}")
