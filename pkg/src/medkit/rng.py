"""SplitMix64, the counter-based generator behind every Monte Carlo draw.

Draw ``i`` (0-based) of the stream with seed ``s`` is::

    z = (s + (i + 1) * 0x9E3779B97F4A7C15) mod 2**64
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9 mod 2**64
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB mod 2**64
    out = z ^ (z >> 31)

and the matching double in [0, 1) is ``(out >> 11) * 2**-53``.  Because any
draw can be computed from its index alone, trials can be split over shards
in any way without changing the stream.

Reference vectors (seed 0): 0xE220A8397B1DCDAF, 0x6E789E6AA1B965F4,
0x06C45D188009454F, 0xF88BB8A8724C81EC.
"""

from __future__ import annotations

import numpy as np

GOLDEN = 0x9E3779B97F4A7C15
MIX1 = 0xBF58476D1CE4E5B9
MIX2 = 0x94D049BB133111EB
MASK = (1 << 64) - 1
INV_2_53 = 1.0 / 9007199254740992.0


def mix64(z: int) -> int:
    z &= MASK
    z = ((z ^ (z >> 30)) * MIX1) & MASK
    z = ((z ^ (z >> 27)) * MIX2) & MASK
    return z ^ (z >> 31)


def draw(seed: int, index: int) -> int:
    return mix64((seed + (index + 1) * GOLDEN) & MASK)


def to_unit(x: int) -> float:
    return (x >> 11) * INV_2_53


class SplitMix64:
    """Stateful view of the stream, for one-off draws outside the kernels."""

    def __init__(self, seed: int, index: int = 0):
        self.seed = int(seed) & MASK
        self.index = int(index)

    def next_u64(self) -> int:
        out = draw(self.seed, self.index)
        self.index += 1
        return out

    def random(self) -> float:
        return to_unit(self.next_u64())


def uniforms(seed: int, start: int, count: int) -> np.ndarray:
    """Vectorised draws ``start .. start+count-1`` as doubles in [0, 1)."""
    idx = np.arange(start + 1, start + count + 1, dtype=np.uint64)
    z = np.uint64(seed & MASK) + idx * np.uint64(GOLDEN)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(MIX1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(MIX2)
    z = z ^ (z >> np.uint64(31))
    return (z >> np.uint64(11)).astype(np.float64) * INV_2_53
