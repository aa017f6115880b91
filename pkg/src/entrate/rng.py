"""Small deterministic RNG: xoshiro256** seeded through splitmix64.

Implemented here so trajectory sampling is bit-for-bit reproducible across
platforms and numpy versions.  Each sampled path derives its own stream
from the batch seed and the path index, so batches can be regenerated
path-by-path and are insensitive to sampling order.
"""

from __future__ import annotations

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15


def _splitmix64(state: int):
    state = (state + GOLDEN) & MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return state, z ^ (z >> 31)


def _rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & MASK64


class Xoshiro256:
    """xoshiro256** with a splitmix64-expanded 64-bit seed."""

    def __init__(self, seed: int):
        state = seed & MASK64
        self.s = []
        for _ in range(4):
            state, word = _splitmix64(state)
            self.s.append(word)

    def next_u64(self) -> int:
        s = self.s
        result = (_rotl((s[1] * 5) & MASK64, 7) * 9) & MASK64
        t = (s[1] << 17) & MASK64
        s[2] ^= s[0]
        s[3] ^= s[1]
        s[1] ^= s[2]
        s[0] ^= s[3]
        s[2] ^= t
        s[3] = _rotl(s[3], 45)
        return result

    def uniform(self) -> float:
        """A float in [0, 1) with 53 random bits."""
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def choice(self, probs) -> int:
        """Index sampled from a probability vector (last index absorbs slack)."""
        u = self.uniform()
        acc = 0.0
        last = 0
        for i, p in enumerate(probs):
            if p <= 0.0:
                continue
            acc += p
            last = i
            if u < acc:
                return i
        return last


def path_rng(seed: int, path_index: int) -> Xoshiro256:
    """Independent stream for one path of a batch."""
    return Xoshiro256((seed ^ (path_index * GOLDEN)) & MASK64)
