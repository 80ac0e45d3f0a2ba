"""Seedable pseudo-randomness with a fixed cross-backend bit stream.

The compiled kernel and the pure-Python twin must emit byte-identical
samples for a given 64-bit seed, so both implement the same generator:
xoshiro256** seeded through splitmix64.  Stdlib `random` is avoided in the
samplers because its internal state is not reproducible across the two
backends at the raw-u64 level.
"""

from __future__ import annotations

from .rationals import Rat, bernoulli_threshold, refine_bernoulli

_MASK64 = (1 << 64) - 1


def splitmix64_stream(seed: int, count: int) -> list[int]:
    out = []
    x = seed & _MASK64
    for _ in range(count):
        x = (x + 0x9E3779B97F4A7C15) & _MASK64
        z = x
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        out.append(z ^ (z >> 31))
    return out


class Xoshiro256StarStar:
    """Pure-Python xoshiro256**; the compiled kernel mirrors it exactly."""

    __slots__ = ("s0", "s1", "s2", "s3")

    def __init__(self, seed: int):
        if not 0 <= seed <= _MASK64:
            raise ValueError("seed must fit in 64 bits")
        s = splitmix64_stream(seed, 4)
        if all(v == 0 for v in s):  # degenerate all-zero state is invalid
            s[0] = 1
        self.s0, self.s1, self.s2, self.s3 = s

    def next_u64(self) -> int:
        s0, s1, s2, s3 = self.s0, self.s1, self.s2, self.s3
        tmp = (s1 * 5) & _MASK64
        result = (((tmp << 7) | (tmp >> 57)) & _MASK64) * 9 & _MASK64
        t = (s1 << 17) & _MASK64
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        s3 = ((s3 << 45) | (s3 >> 19)) & _MASK64
        self.s0, self.s1, self.s2, self.s3 = s0, s1, s2, s3
        return result

    def rand_below(self, n: int) -> int:
        """Unbiased uniform draw from [0, n) by rejection."""
        if n <= 0:
            raise ValueError("rand_below needs n >= 1")
        limit = _MASK64 + 1 - ((_MASK64 + 1) % n)
        while True:
            r = self.next_u64()
            if r < limit:
                return r % n

    def bernoulli(self, p: Rat) -> bool:
        """Exact Bernoulli(p) for rational p, no floating point involved."""
        fl, frac = bernoulli_threshold(p)
        r = self.next_u64()
        if r < fl:
            return True
        if r > fl:
            return False
        return refine_bernoulli(frac, self.next_u64)
