"""Deterministic 64-bit seed derivation for experiment runs.

Every run's seed is a splitmix64-based hash of (base seed, experiment id,
grid point, repeat index).  The mix is pure integer arithmetic with explicit
64-bit masking, so derived seeds are identical across platforms and worker
counts.
"""

from __future__ import annotations

__all__ = ["splitmix64", "mix_seed", "EXPERIMENT_IDS"]

_MASK64 = (1 << 64) - 1

# Fixed tags so each experiment family draws from a disjoint seed universe.
EXPERIMENT_IDS = {
    "success_rate": 1,
    "conv_time": 2,
    "nfe": 3,
    "trajectory": 4,
    "two_layer": 5,
    "bisect": 6,
    "run": 7,
}


def splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def mix_seed(*parts: int) -> int:
    """Fold integer parts into one 64-bit seed, order-sensitively."""
    h = 0
    for p in parts:
        h = splitmix64(h ^ (int(p) & _MASK64))
    return h
