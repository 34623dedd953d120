"""Counter-based random number generation.

Every random draw in the engine is a pure function of
``(seed, stream, counter)``.  There is no generator state to carry around,
so a draw made inside a parallel loop is identical to the same draw made
sequentially, and any slice of the random space can be produced in bulk as
a numpy array.  The construction is two chained splitmix64 steps: the seed
and stream select a per-stream state, the counter walks a Weyl sequence
through it, and the splitmix64 finalizer provides the avalanche.
"""

from __future__ import annotations

import numpy as np

_MASK = (1 << 64) - 1
_WEYL = 0x9E3779B97F4A7C15        # splitmix64 increment
_STREAM_WEYL = 0xC2B2AE3D27D4EB4F  # decorrelates streams from counters
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB
_SEED_SALT = 0x8538ECB5BD456EA3

_INV_2_53 = 1.0 / (1 << 53)

# Stream-space layout.  Genome streams occupy [0, m + r); everything else
# lives far above so purposes never collide.
PLAN_STREAM_BASE = 1 << 32
SPLIT_STREAM = 1 << 33


def _mix(z: int) -> int:
    """splitmix64 finalizer on a Python int (exact 64-bit wrap)."""
    z &= _MASK
    z = ((z ^ (z >> 30)) * _MIX1) & _MASK
    z = ((z ^ (z >> 27)) * _MIX2) & _MASK
    return z ^ (z >> 31)


def _stream_state(seed: int, stream: int) -> int:
    return _mix((_mix(seed ^ _SEED_SALT) + (stream & _MASK) * _STREAM_WEYL) & _MASK)


def rng_bits(seed: int, stream: int, counter: int) -> int:
    """64 pseudo-random bits for the given coordinates."""
    return _mix((_stream_state(seed, stream) + (counter & _MASK) * _WEYL) & _MASK)


def rng_stream(seed: int, stream: int, counter: int) -> float:
    """Uniform float in [0, 1), a pure function of its three coordinates."""
    return (rng_bits(seed, stream, counter) >> 11) * _INV_2_53


def uniform_array(seed: int, stream: int, counters: np.ndarray) -> np.ndarray:
    """Vectorized ``rng_stream`` over an array of counters.

    Bitwise identical to calling ``rng_stream`` per counter; all arithmetic
    is mod 2**64 (numpy uint64 wraps silently for array operands).
    """
    base = np.uint64(_stream_state(seed, stream))
    z = base + counters.astype(np.uint64) * np.uint64(_WEYL)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_MIX1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_MIX2)
    z = z ^ (z >> np.uint64(31))
    return (z >> np.uint64(11)).astype(np.float64) * _INV_2_53


def derive_seed(seed: int, index: int) -> int:
    """Independent 64-bit seed for sub-run ``index`` of a master seed."""
    return _mix((_mix(seed ^ _STREAM_WEYL) + (index & _MASK) * _WEYL) & _MASK)
