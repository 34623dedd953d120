import threading

import numpy as np
import pytest

from gsgp import ConfigError, SequentialBackend, ThreadBackend, choose_chunk, get_backend


@pytest.mark.parametrize("items,workers,expected", [
    (100, 4, 25),
    (10, 16, 1),
    (1, 1, 1),
    (7, 2, 4),
    (8, 3, 3),
])
def test_choose_chunk(items, workers, expected):
    assert choose_chunk(items, workers) == expected


def test_choose_chunk_rejects_nonpositive():
    with pytest.raises(ConfigError):
        choose_chunk(0, 4)
    with pytest.raises(ConfigError):
        choose_chunk(4, 0)


def backends():
    return [SequentialBackend(), ThreadBackend(1), ThreadBackend(8)]


@pytest.mark.parametrize("backend", backends(), ids=lambda b: f"{b.name}{b.workers}")
def test_map_elements_constant_kernel(backend):
    with backend:
        out = np.full((3, 4), -1.0)
        backend.map_elements((3, 4), lambda i, j: 0.0, out)
        assert np.array_equal(out, np.zeros((3, 4)))


@pytest.mark.parametrize("backend", backends(), ids=lambda b: f"{b.name}{b.workers}")
def test_map_elements_row_major_counter(backend):
    with backend:
        out = np.empty((3, 2))
        backend.map_elements((3, 2), lambda i, j: float(i * 2 + j), out)
        assert np.array_equal(out, np.arange(6.0).reshape(3, 2))


def test_map_elements_shape_mismatch():
    with pytest.raises(ConfigError):
        SequentialBackend().map_elements((2, 2), lambda i, j: 0.0, np.empty((3, 2)))


@pytest.mark.parametrize("backend", backends(), ids=lambda b: f"{b.name}{b.workers}")
def test_map_rows_identity(backend):
    with backend:
        assert backend.map_rows(5, lambda i: i) == [0, 1, 2, 3, 4]


def test_map_rows_empty_extent_is_noop():
    for backend in backends():
        with backend:
            assert backend.map_rows(0, lambda i: 1 / 0) == []
            backend.map_row_blocks(0, lambda lo, hi: 1 / 0)


def test_row_sums_identical_across_worker_counts():
    matrix = np.random.default_rng(3).normal(size=(64, 257))
    results = []
    for backend in backends():
        with backend:
            out = np.empty(64)
            backend.map_rows(64, lambda i: float(np.cumsum(matrix[i])[-1]), out=out)
            results.append(out.copy())
    assert np.array_equal(results[0], results[1])
    assert np.array_equal(results[0], results[2])


def test_random_kernels_bitwise_equal_across_workers():
    rng = np.random.default_rng(11)
    for _ in range(5):
        rows, cols = rng.integers(1, 40), rng.integers(1, 40)
        table = rng.normal(size=(rows, cols))
        kernel = lambda i, j: float(np.sin(table[i, j]) * table[i, j])
        outs = []
        for backend in backends():
            with backend:
                out = np.empty((rows, cols))
                backend.map_elements((int(rows), int(cols)), kernel, out)
                outs.append(out.copy())
        assert np.array_equal(outs[0], outs[1])
        assert np.array_equal(outs[0], outs[2])


def test_each_cell_written_exactly_once():
    seen = []
    lock = threading.Lock()

    def kernel(i, j):
        with lock:
            seen.append((i, j))
        return 0.0

    with ThreadBackend(4) as backend:
        backend.map_elements((13, 7), kernel, np.empty((13, 7)))
    assert sorted(seen) == [(i, j) for i in range(13) for j in range(7)]
    assert len(seen) == len(set(seen))


def test_block_bounds_cover_range_disjointly():
    covered = []
    lock = threading.Lock()

    def block(lo, hi):
        with lock:
            covered.append((lo, hi))

    with ThreadBackend(3) as backend:
        backend.map_row_blocks(10, block)
    covered.sort()
    flat = [i for lo, hi in covered for i in range(lo, hi)]
    assert flat == list(range(10))


def test_get_backend():
    assert get_backend("sequential").name == "sequential"
    backend = get_backend("threads", 3)
    assert backend.name == "threads" and backend.workers == 3
    assert get_backend("threads", 0).workers >= 1
    with pytest.raises(ConfigError):
        get_backend("gpu")


def test_descriptor_reports_workers():
    descriptor = ThreadBackend(5).descriptor
    assert descriptor.name == "threads" and descriptor.workers == 5
    assert SequentialBackend().descriptor.workers == 1
