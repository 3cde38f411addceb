"""SplitMix64 generator used wherever reproducibility across runs matters.

Recurrence (all arithmetic modulo 2**64)::

    state = state + 0x9E3779B97F4A7C15
    z = state
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB
    output = z ^ (z >> 31)

Floats in the open interval (0, 1) are ``((output >> 12) + 0.5) / 2**52``;
an integer below ``n`` is ``min(floor(float * n), n - 1)``.  Child streams
are derived with :func:`derive_seed`.  ``uniform(size)`` returns the next
``size`` floats of the same sequence, computed in bulk.
"""

from __future__ import annotations

import numpy as np

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_C1 = 0xBF58476D1CE4E5B9
_C2 = 0x94D049BB133111EB
_SCALE = 1.0 / (1 << 52)


def mix64(z: int) -> int:
    """The SplitMix64 output finalizer."""
    z &= _MASK
    z = ((z ^ (z >> 30)) * _C1) & _MASK
    z = ((z ^ (z >> 27)) * _C2) & _MASK
    return z ^ (z >> 31)


def derive_seed(seed: int, *keys: int) -> int:
    """Fold integer keys into ``seed``: ``s = mix64(s ^ mix64(key + GOLDEN))``."""
    s = seed & _MASK
    for key in keys:
        s = mix64(s ^ mix64((key + _GOLDEN) & _MASK))
    return s


class SplitMix64:
    __slots__ = ("state",)

    def __init__(self, seed: int = 0):
        if seed < 0:
            raise ValueError("seed must be a non-negative integer")
        self.state = seed & _MASK

    def next_u64(self) -> int:
        self.state = (self.state + _GOLDEN) & _MASK
        return mix64(self.state)

    def random(self) -> float:
        """Uniform float in the open interval (0, 1)."""
        return ((self.next_u64() >> 12) + 0.5) * _SCALE

    def randbelow(self, n: int) -> int:
        if n <= 0:
            raise ValueError("n must be positive")
        return min(int(self.random() * n), n - 1)

    def next_u64_block(self, size: int) -> np.ndarray:
        steps = np.arange(1, size + 1, dtype=np.uint64)
        z = np.uint64(self.state) + steps * np.uint64(_GOLDEN)
        self.state = (self.state + size * _GOLDEN) & _MASK
        z = (z ^ (z >> np.uint64(30))) * np.uint64(_C1)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(_C2)
        return z ^ (z >> np.uint64(31))

    def uniform(self, size: int) -> np.ndarray:
        """The next ``size`` outputs of :meth:`random`, as an array."""
        return ((self.next_u64_block(size) >> np.uint64(12)).astype(np.float64) + 0.5) * _SCALE

    def sample_indices(self, n: int, size: int) -> list[int]:
        """Draw ``size`` distinct indices from ``range(n)``.

        Partial Fisher-Yates over a virtual identity permutation: step ``i``
        swaps position ``i`` with ``i + floor(u_i * (n - i))``.  Cost is
        O(size) regardless of ``n``.
        """
        if not 0 <= size <= n:
            raise ValueError(f"cannot draw {size} distinct values from {n}")
        u = self.uniform(size)
        span = n - np.arange(size)
        jumps = np.minimum((u * span).astype(np.int64), span - 1)
        swapped: dict[int, int] = {}
        out = []
        for i, jump in enumerate(jumps.tolist()):
            j = i + jump
            vj = swapped.get(j, j)
            swapped[j] = swapped.get(i, i)
            out.append(vj)
        return out
