"""Execution backends: sequential reference and shared-memory parallel.

Callers hand over pure kernels addressed by row (or element) index; the
backend owns scheduling.  Because every kernel writes a disjoint slice of
the output and carries no cross-invocation state, the result is the same
for any worker count and any chunking - which is what lets the engine
guarantee bitwise-equal runs across backends.

``map_row_blocks`` is the workhorse: a block kernel receives a half-open
row range and is free to compute it with vectorized array code.  The
finer-grained ``map_rows`` / ``map_elements`` are layered on top of the
same chunking.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .core import ConfigError


@dataclass(frozen=True)
class BackendDescriptor:
    name: str
    workers: int
    chunking: str = "even-contiguous"


def choose_chunk(work_items: int, workers: int) -> int:
    """Rows per worker: ceil(work_items / workers), never below 1."""
    if work_items < 1 or workers < 1:
        raise ConfigError("choose_chunk requires positive work_items and workers")
    return max(1, -(-work_items // workers))


class SequentialBackend:
    """Reference implementation: one task, plain loops."""

    name = "sequential"

    def __init__(self):
        self.workers = 1

    @property
    def descriptor(self) -> BackendDescriptor:
        return BackendDescriptor(self.name, self.workers)

    def map_row_blocks(self, count: int, block_kernel: Callable[[int, int], None]) -> None:
        if count > 0:
            block_kernel(0, count)

    def map_rows(self, count: int, kernel: Callable[[int], object],
                 out: Sequence | None = None) -> list | None:
        collected = [None] * count if out is None else None
        target = collected if out is None else out

        def block(lo: int, hi: int) -> None:
            for i in range(lo, hi):
                target[i] = kernel(i)

        self.map_row_blocks(count, block)
        return collected

    def map_elements(self, shape: tuple[int, int],
                     kernel: Callable[[int, int], float], out: np.ndarray) -> None:
        rows, cols = shape
        if out.shape != (rows, cols):
            raise ConfigError(f"output shape {out.shape} != extent {(rows, cols)}")

        def block(lo: int, hi: int) -> None:
            for i in range(lo, hi):
                row = out[i]
                for j in range(cols):
                    row[j] = kernel(i, j)

        self.map_row_blocks(rows, block)

    def close(self) -> None:
        pass

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()
        return False


class ThreadBackend(SequentialBackend):
    """Shared-memory data-parallel backend over a thread pool.

    Each task computes a contiguous block of rows; numpy kernels release
    the GIL for the bulk of the work.  Output placement is by index, so
    scheduling order is unobservable.
    """

    name = "threads"

    def __init__(self, workers: int = 0):
        if workers < 0:
            raise ConfigError("workers must be >= 0")
        self.workers = workers if workers > 0 else (os.cpu_count() or 1)
        self._pool: ThreadPoolExecutor | None = None

    def _executor(self) -> ThreadPoolExecutor:
        if self._pool is None:
            self._pool = ThreadPoolExecutor(max_workers=self.workers)
        return self._pool

    def map_row_blocks(self, count: int, block_kernel: Callable[[int, int], None]) -> None:
        if count <= 0:
            return
        chunk = choose_chunk(count, self.workers)
        if chunk >= count:
            block_kernel(0, count)
            return
        bounds = [(lo, min(lo + chunk, count)) for lo in range(0, count, chunk)]
        futures = [self._executor().submit(block_kernel, lo, hi) for lo, hi in bounds]
        for f in futures:
            f.result()

    def close(self) -> None:
        if self._pool is not None:
            self._pool.shutdown(wait=True)
            self._pool = None


def get_backend(name: str, workers: int = 0) -> SequentialBackend:
    if name == "sequential":
        return SequentialBackend()
    if name == "threads":
        return ThreadBackend(workers)
    raise ConfigError(f"unknown backend {name!r}")
