"""Counter-based random streams.

Every random quantity in the package is a pure function of ``(seed, tag,
trial, counter)``: a trial gets a 64-bit key, and its ``j``-th uniform is
``mix64(key + (j + 1) * GAMMA)`` mapped to ``[0, 1)``. This is the SplitMix64
output function evaluated at an arbitrary counter, so draws can be produced
out of order, in parallel, and identically by the compiled kernels and the
numpy fallback.

For the infinite-shape walks the counter is a box code instead of a draw
index, which makes the tile of a box a fixed property of the random field:
two pipes that visit the same box see the same tile.
"""

from __future__ import annotations

import hashlib

import numpy as np

MASK64 = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB
_TO_UNIT = 1.0 / 9007199254740992.0  # 2**-53


def mix64(z: int) -> int:
    """SplitMix64 finalizer on a Python int (reduced mod 2**64)."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * _M1) & MASK64
    z = ((z ^ (z >> 27)) * _M2) & MASK64
    return z ^ (z >> 31)


def mix64_array(z: np.ndarray) -> np.ndarray:
    z = np.asarray(z, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = (z ^ (z >> np.uint64(30))) * np.uint64(_M1)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(_M2)
    return z ^ (z >> np.uint64(31))


def tag_hash(tag: str) -> int:
    return int.from_bytes(hashlib.blake2b(tag.encode(), digest_size=8).digest(), "little")


def base_key(seed: int, tag: str) -> int:
    if not 0 <= seed <= MASK64:
        raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
    return mix64(mix64(seed) ^ tag_hash(tag))


def trial_keys(seed: int, tag: str, start: int, count: int) -> np.ndarray:
    """Keys for trials ``start .. start+count-1`` of stream ``tag``."""
    base = np.uint64(base_key(seed, tag))
    idx = np.arange(start, start + count, dtype=np.uint64)
    return mix64_array(base + idx * np.uint64(GAMMA))


def uniform(key: int, counter: int) -> float:
    return (mix64(key + (counter + 1) * GAMMA) >> 11) * _TO_UNIT


def uniforms(key, counters) -> np.ndarray:
    """Vectorised :func:`uniform`; ``key`` and ``counters`` broadcast."""
    key = np.asarray(key, dtype=np.uint64)
    ctr = np.asarray(counters, dtype=np.uint64)
    with np.errstate(over="ignore"):  # 0-d operands warn on the intended wraparound
        z = mix64_array(key + (ctr + np.uint64(1)) * np.uint64(GAMMA))
    return (z >> np.uint64(11)).astype(np.float64) * _TO_UNIT


def box_code(x, y):
    """Injective 64-bit code of box coordinates (32-bit two's complement each)."""
    if isinstance(x, (int, np.integer)) and isinstance(y, (int, np.integer)):
        return ((int(x) & 0xFFFFFFFF) << 32) | (int(y) & 0xFFFFFFFF)
    xs = np.asarray(x, dtype=np.int64) & 0xFFFFFFFF
    ys = np.asarray(y, dtype=np.int64) & 0xFFFFFFFF
    return (xs.astype(np.uint64) << np.uint64(32)) | ys.astype(np.uint64)


class Stream:
    """A single keyed stream of uniforms consumed in order.

    Used for one-off samples (a single pipe dream, a single subword). Batch
    experiments derive per-trial keys with :func:`trial_keys` instead.
    """

    def __init__(self, seed: int, tag: str = "default", trial: int = 0):
        self.seed = seed
        self.tag = tag
        self.trial = trial
        self.key = int(trial_keys(seed, tag, trial, 1)[0])
        self.counter = 0

    def random(self, size: int | None = None):
        if size is None:
            u = uniform(self.key, self.counter)
            self.counter += 1
            return u
        out = uniforms(self.key, np.arange(self.counter, self.counter + size, dtype=np.uint64))
        self.counter += size
        return out

    def __repr__(self) -> str:
        return f"Stream(seed={self.seed}, tag={self.tag!r}, trial={self.trial}, counter={self.counter})"


def as_stream(rng, tag: str = "default") -> Stream:
    """Accept a :class:`Stream`, an integer seed, or a numpy Generator."""
    if isinstance(rng, Stream):
        return rng
    if isinstance(rng, np.random.Generator):
        return Stream(int(rng.integers(0, 2**63, dtype=np.int64)), tag)
    if isinstance(rng, (int, np.integer)):
        return Stream(int(rng), tag)
    raise TypeError(f"cannot build a random stream from {type(rng).__name__}")
