"""Deterministic random number generation for reproducible runs.

The simulator consumes randomness through a xoshiro256** stream seeded via
splitmix64, with a fixed draw order documented in the simulator module. The
compiled backend reimplements the identical algorithm, so event logs are
bit-for-bit reproducible across backends for the same seed.

Trial seeds for batch runs are the successive outputs of a splitmix64 stream
seeded with the master seed; this keeps multi-trial output independent of
worker scheduling.
"""

from __future__ import annotations

MASK64 = 0xFFFFFFFFFFFFFFFF
_GOLDEN = 0x9E3779B97F4A7C15

# largest double below 1.0 times 2**53; used to map uint64 -> [0, 1)
_INV_2_53 = 1.0 / 9007199254740992.0


def splitmix64_next(state: int) -> tuple[int, int]:
    """Advance a splitmix64 state; returns (new_state, output)."""
    state = (state + _GOLDEN) & MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return state, z ^ (z >> 31)


def trial_seeds(master_seed: int, count: int) -> list[int]:
    """Derive per-trial seeds: the first `count` splitmix64 outputs of master_seed."""
    state = master_seed & MASK64
    out = []
    for _ in range(count):
        state, z = splitmix64_next(state)
        out.append(z)
    return out


def _rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & MASK64


class Xoshiro256StarStar:
    """xoshiro256** generator; state seeded from a 64-bit seed via splitmix64."""

    __slots__ = ("s0", "s1", "s2", "s3")

    def __init__(self, seed: int):
        state = seed & MASK64
        state, self.s0 = splitmix64_next(state)
        state, self.s1 = splitmix64_next(state)
        state, self.s2 = splitmix64_next(state)
        state, self.s3 = splitmix64_next(state)

    def next_u64(self) -> int:
        s0, s1, s2, s3 = self.s0, self.s1, self.s2, self.s3
        result = (_rotl((s1 * 5) & MASK64, 7) * 9) & MASK64
        t = (s1 << 17) & MASK64
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        s3 = _rotl(s3, 45)
        self.s0, self.s1, self.s2, self.s3 = s0, s1, s2, s3
        return result

    def next_double(self) -> float:
        """Uniform double in [0, 1): top 53 bits of the next output."""
        return (self.next_u64() >> 11) * _INV_2_53

    def next_index(self, n: int) -> int:
        """Uniform integer in [0, n). Plain modulo; bias is < n / 2**64."""
        return self.next_u64() % n
