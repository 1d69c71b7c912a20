"""Counter-based random draws keyed by (seed, stream, index, attempt).

Every draw is a pure function of its key, so a value does not depend on how
many other values were drawn before it. The mixing function is the SplitMix64
finalizer::

    mix64(z):
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9   (mod 2**64)
        z = (z ^ (z >> 27)) * 0x94D049BB133111EB   (mod 2**64)
        return z ^ (z >> 31)

and a key ``(w_1, ..., w_r)`` under ``seed`` hashes to::

    h = mix64(seed)
    for w in (w_1, ..., w_r):
        h = mix64((h ^ w) + 0x9E3779B97F4A7C15)   (mod 2**64)

Uniform integers on ``[0, n)`` use rejection: a 64-bit word ``h`` is accepted
when ``h < floor(2**64 / n) * n`` and mapped to ``h % n``; otherwise the
``attempt`` word of the key is incremented and the draw repeated.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB


def mix64(z: int) -> int:
    z &= MASK64
    z = ((z ^ (z >> 30)) * _M1) & MASK64
    z = ((z ^ (z >> 27)) * _M2) & MASK64
    return z ^ (z >> 31)


def hash_key(seed: int, *words: int) -> int:
    """Scalar reference hash of ``words`` under ``seed``."""
    h = mix64(seed)
    for w in words:
        h = mix64(((h ^ (w & MASK64)) + GAMMA) & MASK64)
    return h


def derive_seed(seed: int, index: int) -> int:
    """Seed of trial ``index`` in a run seeded with ``seed``."""
    return hash_key(seed, index)


def _mix64_array(z: np.ndarray) -> np.ndarray:
    # uint64 wraparound is the intended mod-2**64 arithmetic
    z = z ^ (z >> np.uint64(30))
    z = z * np.uint64(_M1)
    z = z ^ (z >> np.uint64(27))
    z = z * np.uint64(_M2)
    return z ^ (z >> np.uint64(31))


def hash_array(seed: int, *words) -> np.ndarray:
    """Vectorized :func:`hash_key`; each word is a scalar or a uint64 array."""
    h = np.uint64(mix64(seed))
    gamma = np.uint64(GAMMA)
    with np.errstate(over="ignore"):
        for w in words:
            if isinstance(w, (int, np.integer)):
                w = np.uint64(int(w) & MASK64)
            else:
                w = np.asarray(w, dtype=np.uint64)
            h = _mix64_array((h ^ w) + gamma)
    return np.asarray(h, dtype=np.uint64)


def uniform_below(n: int, seed: int, stream: int, index: np.ndarray) -> np.ndarray:
    """Unbiased integers in ``[0, n)``, one per entry of ``index``.

    Entry ``i`` is keyed by ``(stream, index[i], attempt)``.
    """
    if n < 1:
        raise ValueError("n must be positive")
    index = np.asarray(index, dtype=np.uint64)
    limit = ((1 << 64) // n) * n
    out = np.empty(index.shape, dtype=np.int64)
    pending = np.arange(index.size)
    attempt = 0
    while pending.size:
        h = hash_array(seed, stream, index[pending], attempt)
        if limit == 1 << 64:
            ok = np.ones(h.shape, dtype=bool)
        else:
            ok = h < np.uint64(limit)
        out[pending[ok]] = (h[ok] % np.uint64(n)).astype(np.int64)
        pending = pending[~ok]
        attempt += 1
    return out


def uniform_below_scalar(n: int, seed: int, stream: int, index: int) -> int:
    """Scalar reference for :func:`uniform_below`."""
    limit = ((1 << 64) // n) * n
    attempt = 0
    while True:
        h = hash_key(seed, stream, index, attempt)
        if h < limit:
            return h % n
        attempt += 1


def unit_uniform(seed: int, stream: int, index: np.ndarray) -> np.ndarray:
    """Floats in ``[0, 1)`` built from the top 53 bits of each hash."""
    h = hash_array(seed, stream, np.asarray(index, dtype=np.uint64), 0)
    return (h >> np.uint64(11)).astype(np.float64) * (1.0 / (1 << 53))
