"""Deterministic seed derivation for parallel Monte Carlo trials.

Splitting rule: starting from the 64-bit master seed, each index level
(trial, then location or realization) is folded in as

    state = splitmix64(state XOR (index + 1) * GOLDEN_GAMMA)

with state initialized to splitmix64(master). Streams derived this way are
independent of execution order, so worker-pool size never changes results.
"""

from __future__ import annotations

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15


def splitmix64(state: int) -> int:
    """One SplitMix64 output step for a 64-bit state."""
    z = (state + GOLDEN_GAMMA) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return (z ^ (z >> 31)) & MASK64


def derive_seed(master: int, *indices: int) -> int:
    """64-bit stream seed for the given index path under the master seed."""
    state = splitmix64(master & MASK64)
    for idx in indices:
        state = splitmix64(state ^ (((idx + 1) * GOLDEN_GAMMA) & MASK64))
    return state
