"""Deterministic stimulus PRNG.

xoshiro256** seeded through splitmix64, with draws taking the top bits
of each 64-bit output. The exact construction is part of the tool's
contract: any reimplementation (in another language or another process)
must reproduce the same draw sequence bit for bit, so stimulus vectors
can be regenerated from a seed alone.
"""

from __future__ import annotations

_MASK64 = (1 << 64) - 1


def _rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & _MASK64


def splitmix64_stream(seed: int):
    """Infinite stream of splitmix64 outputs starting from seed."""
    state = seed & _MASK64
    while True:
        state = (state + 0x9E3779B97F4A7C15) & _MASK64
        z = state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        yield z ^ (z >> 31)


class Xoshiro256StarStar:
    """xoshiro256** with splitmix64 state initialization."""

    def __init__(self, seed: int):
        stream = splitmix64_stream(seed)
        self.s = [next(stream) for _ in range(4)]

    def next_u64(self) -> int:
        s = self.s
        result = (_rotl((s[1] * 5) & _MASK64, 7) * 9) & _MASK64
        t = (s[1] << 17) & _MASK64
        s[2] ^= s[0]
        s[3] ^= s[1]
        s[1] ^= s[2]
        s[0] ^= s[3]
        s[2] ^= t
        s[3] = _rotl(s[3], 45)
        return result

    def draw(self, width: int) -> int:
        """Draw a width-bit value from the top bits of the next output."""
        if not 1 <= width <= 64:
            raise ValueError(f"draw width must be in [1, 64], got {width}")
        return self.next_u64() >> (64 - width)
