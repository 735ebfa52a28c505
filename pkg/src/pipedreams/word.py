"""Words over the adjacent transpositions s_1, ..., s_{n-1} and the permutations they represent.

Product convention: start from the identity one-line notation and, for each
letter ``i`` in order, swap the entries in positions ``i`` and ``i + 1``.
Under this convention the staircase word represents the decreasing
permutation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .errors import WordError
from .rng import as_stream


@dataclass(frozen=True)
class Word:
    n: int
    letters: tuple[int, ...]

    def __init__(self, n: int, letters: Iterable[int] = ()):
        n = int(n)
        if n < 2:
            raise WordError(f"n must be at least 2, got {n}")
        letters = tuple(int(a) for a in letters)
        for a in letters:
            if not 1 <= a <= n - 1:
                raise WordError(f"letter {a} outside [1, {n - 1}]")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "letters", letters)

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def __getitem__(self, i):
        return self.letters[i]

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.letters, dtype=np.int32)

    def __add__(self, other: "Word") -> "Word":
        if other.n != self.n:
            raise WordError("cannot concatenate words of different rank")
        return Word(self.n, self.letters + other.letters)


@dataclass(frozen=True)
class Perm:
    """A permutation of 1..n in one-line notation."""

    one_line: tuple[int, ...]

    def __init__(self, one_line: Iterable[int]):
        one_line = tuple(int(v) for v in one_line)
        if sorted(one_line) != list(range(1, len(one_line) + 1)):
            raise WordError(f"{one_line} is not a permutation of 1..{len(one_line)}")
        object.__setattr__(self, "one_line", one_line)

    @classmethod
    def from_string(cls, s: str) -> "Perm":
        return cls(int(c) for c in s)

    @classmethod
    def identity(cls, n: int) -> "Perm":
        return cls(range(1, n + 1))

    @classmethod
    def decreasing(cls, n: int) -> "Perm":
        return cls(range(n, 0, -1))

    @property
    def n(self) -> int:
        return len(self.one_line)

    def __len__(self) -> int:
        return len(self.one_line)

    def __iter__(self):
        return iter(self.one_line)

    def __getitem__(self, i):
        return self.one_line[i]

    def __str__(self) -> str:
        if self.n < 10:
            return "".join(map(str, self.one_line))
        return " ".join(map(str, self.one_line))

    def to_json(self) -> list[int]:
        return list(self.one_line)


def permutation_of(w: Word) -> Perm:
    perm = kernels.apply_swaps(w.array, np.ones(len(w), dtype=np.uint8), w.n)
    return Perm(perm.tolist())


def inversions(v: Perm | Sequence[int]) -> int:
    """Number of pairs a < b appearing out of order (Fenwick tree, O(n log n))."""
    arr = np.asarray(v.one_line if isinstance(v, Perm) else v, dtype=np.int64)
    return int(kernels.count_inversions(np.ascontiguousarray(arr)))


def alternation_violation(w: Word) -> tuple[int, int] | None:
    """First pair (i, i+1) whose letters fail to alternate, or None."""
    # last[i] holds the most recent letter seen among {i, i+1}
    last = [0] * (w.n + 1)
    for a in w.letters:
        if a >= 2:
            if last[a - 1] == a:
                return (a - 1, a)
            last[a - 1] = a
        if a <= w.n - 2:
            if last[a] == a:
                return (a, a + 1)
            last[a] = a
    return None


def is_alternating(w: Word) -> bool:
    return alternation_violation(w) is None


def is_reduced(w: Word) -> bool:
    return len(w) == inversions(permutation_of(w))


def occurrence_counts(w: Word) -> np.ndarray:
    """O_i for i = 1..n-1 (index 0 holds O_1)."""
    return np.bincount(w.array, minlength=w.n)[1:].astype(np.int64)


def sample_subword(w: Word, p: float, rng) -> Word:
    """Keep each letter independently with probability ``p``."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    stream = as_stream(rng, "subword")
    keep = stream.random(len(w)) < p
    return Word(w.n, (a for a, k in zip(w.letters, keep) if k))


def staircase_word(n: int) -> Word:
    """(s_{n-1})(s_{n-2} s_{n-1}) ... (s_1 s_2 ... s_{n-1})."""
    if n < 2:
        raise WordError(f"staircase word needs n >= 2, got {n}")
    letters: list[int] = []
    for start in range(n - 1, 0, -1):
        letters.extend(range(start, n))
    return Word(n, letters)


def bipartite_word(n: int, rho: int, odd_tail: bool = False) -> Word:
    """(x_n y_n)^rho, with x_n = s_1 s_3 ... and y_n = s_2 s_4 ...; ``odd_tail`` appends one more x_n."""
    if n < 3:
        raise WordError(f"bipartite word needs n >= 3, got {n}")
    if rho < 1:
        raise WordError(f"rho must be at least 1, got {rho}")
    x = list(range(1, n, 2))
    y = list(range(2, n, 2))
    letters = (x + y) * rho
    if odd_tail:
        letters += x
    return Word(n, letters)


def reduced_bipartite_word(n: int) -> Word:
    """The reduced word for the decreasing permutation built from x_n and y_n."""
    if n % 2 == 0:
        return bipartite_word(n, n // 2)
    return bipartite_word(n, (n - 1) // 2, odd_tail=True)
