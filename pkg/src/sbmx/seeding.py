"""Deterministic seed derivation for parallel Monte Carlo trials.

Every trial draws its own 64-bit seed from (base_seed, index...) through a
fixed avalanche mix (the splitmix64 finalizer), so results do not depend on
scheduling order or thread count.
"""

from __future__ import annotations

_MASK64 = 0xFFFFFFFFFFFFFFFF
_GOLDEN = 0x9E3779B97F4A7C15


def mix64(x: int) -> int:
    """splitmix64 finalizer: a bijective 64-bit avalanche mix."""
    x &= _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def derive_seed(base_seed: int, *indices: int) -> int:
    """Derive a child seed from a base seed and any number of indices.

    Deterministic, order-sensitive, and collision-resistant enough for
    Monte Carlo bookkeeping; distinct index tuples give unrelated streams.
    """
    h = mix64((base_seed + _GOLDEN) & _MASK64)
    for ix in indices:
        h = mix64((h + _GOLDEN + ix) & _MASK64)
    return h
