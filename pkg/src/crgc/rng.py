"""Deterministic 64-bit random source with a fixed, documented algorithm.

SplitMix64 (Steele, Lea, Flood's mixer, the JDK splittable-seed step):

    state = (state + 0x9E3779B97F4A7C15) mod 2**64
    z = state
    z = ((z XOR (z >> 30)) * 0xBF58476D1CE4E5B9) mod 2**64
    z = ((z XOR (z >> 27)) * 0x94D049BB133111EB) mod 2**64
    output z XOR (z >> 31)

Sampling uses rejection below the largest multiple of the bound, so
draws are exactly uniform, and selection without replacement is a
partial Fisher-Yates shuffle.  Results therefore replicate across
platforms and Python versions.
"""

from __future__ import annotations

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


class SplitMix64:
    def __init__(self, seed: int):
        self._state = seed & _MASK

    def next_u64(self) -> int:
        self._state = (self._state + _GOLDEN) & _MASK
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return z ^ (z >> 31)

    def randbelow(self, bound: int) -> int:
        """Uniform integer in [0, bound)."""
        if bound <= 0:
            raise ValueError("bound must be positive")
        limit = (1 << 64) - ((1 << 64) % bound)
        while True:
            v = self.next_u64()
            if v < limit:
                return v % bound

    def sample(self, population, count: int) -> list:
        """count distinct items, order-dependent on the draw sequence."""
        pool = list(population)
        if count > len(pool):
            raise ValueError("sample larger than population")
        out = []
        for _ in range(count):
            i = self.randbelow(len(pool))
            out.append(pool.pop(i))
        return out


def derive_stream(seed: int, label: int) -> SplitMix64:
    """Independent deterministic stream for (seed, label)."""
    return SplitMix64((seed ^ (label * _GOLDEN)) & _MASK)
