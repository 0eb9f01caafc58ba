"""Deterministic 64-bit RNG shared by both kernel backends.

splitmix64 is trivial to reproduce exactly in C and in Python integer
arithmetic, so the compiled and fallback kernels consume identical random
streams: document visit order and negative-sample choices match bit for bit
across backends, leaving floating-point rounding as the only divergence.
"""

from __future__ import annotations

_MASK64 = (1 << 64) - 1


def splitmix64_next(state: int) -> tuple[int, int]:
    """Advance the state and return ``(new_state, random_u64)``."""
    state = (state + 0x9E3779B97F4A7C15) & _MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    z = z ^ (z >> 31)
    return state, z


def shuffle_in_place(values, state: int) -> int:
    """Fisher-Yates shuffle driven by splitmix64; returns the new state."""
    for i in range(len(values) - 1, 0, -1):
        state, z = splitmix64_next(state)
        j = z % (i + 1)
        values[i], values[j] = values[j], values[i]
    return state
