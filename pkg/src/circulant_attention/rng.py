"""SplitMix64 stream, used wherever outputs must be reproducible bit for bit.

The generator is tiny and fully specified, so a given seed yields the same
weights and inputs in any language that implements the same recurrence.
"""

from __future__ import annotations

import numpy as np

_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_MASK = (1 << 64) - 1


class SplitMix64:
    def __init__(self, seed: int):
        self.state = int(seed) & _MASK

    def next_u64(self, count: int) -> np.ndarray:
        """The next ``count`` outputs as a uint64 array."""
        start = np.uint64(self.state)
        with np.errstate(over="ignore"):
            z = start + _GAMMA * np.arange(1, count + 1, dtype=np.uint64)
            z = (z ^ (z >> np.uint64(30))) * _M1
            z = (z ^ (z >> np.uint64(27))) * _M2
            z = z ^ (z >> np.uint64(31))
        self.state = (self.state + count * int(_GAMMA)) & _MASK
        return z

    def uniform(self, shape, low: float = 0.0, high: float = 1.0) -> np.ndarray:
        """Doubles in ``[low, high)`` from the top 53 bits of each output."""
        count = int(np.prod(shape, dtype=np.int64))
        u = (self.next_u64(count) >> np.uint64(11)).astype(np.float64) * 2.0**-53
        return (low + (high - low) * u).reshape(shape)
