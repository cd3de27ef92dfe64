"""Counter-based deterministic random numbers.

Every draw is a pure function of (stream key, counter), so results do not
depend on evaluation order, parallelism, platform, or library version.
Stream keys are derived by hashing a user seed together with a label path;
the generator itself is a splitmix64-style avalanche over key + counter.
"""
from __future__ import annotations

import hashlib

import numpy as np

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB

_TWO_POW_NEG53 = 2.0**-53


def derive_key(seed: int, *tokens: int | str) -> int:
    """Derive a 64-bit stream key from a seed and a label path.

    Tokens are length-prefixed before hashing so distinct paths can never
    collide by concatenation.
    """
    h = hashlib.blake2b(digest_size=8)
    h.update((seed & _MASK64).to_bytes(8, "little"))
    for tok in tokens:
        if isinstance(tok, int) and not isinstance(tok, bool):
            h.update(b"i")
            h.update((tok & _MASK64).to_bytes(8, "little"))
        else:
            raw = str(tok).encode("utf-8")
            h.update(b"s")
            h.update(len(raw).to_bytes(4, "little"))
            h.update(raw)
    return int.from_bytes(h.digest(), "little")


def _mix(z: int) -> int:
    z = (z ^ (z >> 30)) * _MIX1 & _MASK64
    z = (z ^ (z >> 27)) * _MIX2 & _MASK64
    return z ^ (z >> 31)


def uniform(key: int, counter: int) -> float:
    """Uniform double in [0, 1) at position ``counter`` of stream ``key``."""
    z = (key + ((counter + 1) * _GOLDEN)) & _MASK64
    return (_mix(z) >> 11) * _TWO_POW_NEG53


def _mixed_words(key: int, n: int) -> np.ndarray:
    # uint64 array ops wrap mod 2**64, matching the scalar path exactly
    idx = np.arange(1, n + 1, dtype=np.uint64)
    z = np.uint64(key & _MASK64) + idx * np.uint64(_GOLDEN)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_MIX1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_MIX2)
    return z ^ (z >> np.uint64(31))


def uniform_array(key: int, n: int) -> np.ndarray:
    """First ``n`` uniform [0, 1) doubles of stream ``key``."""
    if n < 0:
        raise ValueError("n must be non-negative")
    words = _mixed_words(key, n)
    return (words >> np.uint64(11)).astype(np.float64) * _TWO_POW_NEG53


def normal_array(key: int, n: int) -> np.ndarray:
    """First ``n`` standard-normal doubles of stream ``key`` (Box-Muller)."""
    if n < 0:
        raise ValueError("n must be non-negative")
    if n == 0:
        return np.zeros(0)
    pairs = (n + 1) // 2
    u = uniform_array(key, 2 * pairs)
    u1 = 1.0 - u[:pairs]  # in (0, 1], keeps log() finite
    u2 = u[pairs:]
    radius = np.sqrt(-2.0 * np.log(u1))
    theta = (2.0 * np.pi) * u2
    out = np.concatenate([radius * np.cos(theta), radius * np.sin(theta)])
    return out[:n]
