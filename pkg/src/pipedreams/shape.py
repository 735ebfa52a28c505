"""Finite shapes of boxes in the diagonal strip 1 <= x - y <= n - 1.

A box ``b(x, y)`` is the unit square with lower-left corner ``(x, y)``; its
diagonal is ``x - y`` and its level is ``x + y``. Shapes are ordered by the
product order (``x <= x'`` and ``y <= y'``). Boxes are stored as numpy
coordinate arrays in canonical order: level ascending, ties broken by
diagonal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .errors import NotAlternatingError, ShapeError
from .word import Word, alternation_violation


class BoxCoord(NamedTuple):
    x: int
    y: int

    @property
    def diagonal(self) -> int:
        return self.x - self.y

    @property
    def level(self) -> int:
        return self.x + self.y


FAMILIES = ("staircase", "strip", "custom", "from_word")


class Shape:
    """An immutable finite set of boxes of rank ``n - 1``."""

    __slots__ = ("n", "family", "_xs", "_ys", "_index")

    def __init__(self, n: int, xs, ys, family: str = "custom"):
        n = int(n)
        if n < 2:
            raise ShapeError(f"n must be at least 2, got {n}")
        if family not in FAMILIES:
            raise ShapeError(f"unknown shape family {family!r}")
        xs = np.asarray(xs, dtype=np.int64).ravel()
        ys = np.asarray(ys, dtype=np.int64).ravel()
        if xs.shape != ys.shape:
            raise ShapeError("coordinate arrays differ in length")
        d = xs - ys
        bad = np.flatnonzero((d < 1) | (d > n - 1))
        if bad.size:
            i = bad[0]
            raise ShapeError(
                f"box ({xs[i]}, {ys[i]}) has diagonal {d[i]} outside [1, {n - 1}]"
            )
        order = np.lexsort((d, xs + ys))
        xs, ys = xs[order], ys[order]
        if xs.size > 1:
            dup = np.flatnonzero((np.diff(xs) == 0) & (np.diff(ys) == 0))
            if dup.size:
                i = dup[0]
                raise ShapeError(f"duplicate box ({xs[i]}, {ys[i]})")
        xs.setflags(write=False)
        ys.setflags(write=False)
        self.n = n
        self.family = family
        self._xs = xs
        self._ys = ys
        self._index = None

    @property
    def xs(self) -> np.ndarray:
        return self._xs

    @property
    def ys(self) -> np.ndarray:
        return self._ys

    @property
    def diagonals(self) -> np.ndarray:
        return self._xs - self._ys

    @property
    def levels(self) -> np.ndarray:
        return self._xs + self._ys

    def __len__(self) -> int:
        return int(self._xs.size)

    @property
    def size(self) -> int:
        return len(self)

    def boxes(self) -> list[BoxCoord]:
        return [BoxCoord(int(x), int(y)) for x, y in zip(self._xs, self._ys)]

    def __iter__(self):
        return iter(self.boxes())

    @property
    def index(self) -> dict[tuple[int, int], int]:
        """Map from (x, y) to canonical position; built on first use."""
        if self._index is None:
            self._index = {(int(x), int(y)): i for i, (x, y) in enumerate(zip(self._xs, self._ys))}
        return self._index

    def __contains__(self, box) -> bool:
        return (int(box[0]), int(box[1])) in self.index

    def __eq__(self, other) -> bool:
        if not isinstance(other, Shape):
            return NotImplemented
        return (
            self.n == other.n
            and np.array_equal(self._xs, other._xs)
            and np.array_equal(self._ys, other._ys)
        )

    def __hash__(self) -> int:
        return hash((self.n, self._xs.tobytes(), self._ys.tobytes()))

    def __repr__(self) -> str:
        return f"Shape(n={self.n}, family={self.family!r}, boxes={len(self)})"

    def translated(self, k: int) -> "Shape":
        """Shift every box by (k, k); diagonals are preserved, levels move by 2k."""
        return Shape(self.n, self._xs + k, self._ys + k, self.family)

    def normalized(self) -> "Shape":
        """Diagonal-preserving translate whose minimal level is 0 or 1."""
        if len(self) == 0:
            return self
        return self.translated(-(int(self.levels.min()) // 2))

    def to_json(self) -> dict:
        return {"n": self.n, "boxes": [[int(x), int(y)] for x, y in zip(self._xs, self._ys)]}


@dataclass(frozen=True)
class LinearExtension:
    n: int
    order: tuple[BoxCoord, ...]

    def __len__(self) -> int:
        return len(self.order)

    def is_valid_for(self, s: Shape) -> bool:
        if sorted(self.order) != sorted(s.boxes()):
            return False
        pos = {b: i for i, b in enumerate(self.order)}
        for b in self.order:
            for nb in (BoxCoord(b.x + 1, b.y), BoxCoord(b.x, b.y + 1)):
                if nb in pos and pos[nb] < pos[b]:
                    return False
        return True


@dataclass(frozen=True)
class ShapeDiagnostics:
    n: int
    max_count: int
    small_diagonals: int
    ratio_max: float
    epsilon: float

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "max_count": self.max_count,
            "small_diagonals": self.small_diagonals,
            "ratio_max": self.ratio_max,
            "epsilon": self.epsilon,
        }


def word_of(ext: LinearExtension) -> Word:
    return Word(ext.n, (b.diagonal for b in ext.order))


def staircase(n: int) -> Shape:
    """Boxes b(x, y) with x >= 1, y <= 0 and x - y <= n - 1."""
    if n < 2:
        raise ShapeError(f"staircase needs n >= 2, got {n}")
    d = np.repeat(np.arange(1, n, dtype=np.int64), np.arange(1, n))
    starts = np.repeat(np.cumsum(np.arange(0, n - 1)), np.arange(1, n))
    x = np.arange(d.size, dtype=np.int64) - starts + 1
    return Shape(n, x, x - d, "staircase")


def strip(n: int, rho: int, odd_tail: bool = False) -> Shape:
    """Shape of the bipartite word (x_n y_n)^rho."""
    from .word import bipartite_word

    if n < 3 or rho < 1:
        raise ShapeError(f"strip needs n >= 3 and rho >= 1, got n={n}, rho={rho}")
    s, _ = from_word(bipartite_word(n, rho, odd_tail))
    return Shape(n, s.xs, s.ys, "strip")


def from_boxes(n: int, boxes: Iterable[Sequence[int]]) -> Shape:
    coords = [(int(b[0]), int(b[1])) for b in boxes]
    if not coords:
        return Shape(n, [], [], "custom")
    xs, ys = zip(*coords)
    return Shape(n, xs, ys, "custom")


def _components(counts: np.ndarray) -> list[tuple[int, int]]:
    """Maximal runs [lo, hi] of consecutive diagonals with at least one letter."""
    runs = []
    i = 1
    n1 = counts.size
    while i <= n1:
        if counts[i - 1] == 0:
            i += 1
            continue
        lo = i
        while i <= n1 and counts[i - 1] > 0:
            i += 1
        runs.append((lo, i - 1))
    return runs


def from_word(w: Word) -> tuple[Shape, LinearExtension]:
    """Order-convex shape and linear extension whose reading word is ``w``.

    Within a run of consecutive occupied diagonals the boxes of diagonal ``i``
    are consecutive, and diagonal ``i + 1`` starts one column later when
    ``s_i`` precedes ``s_{i+1}`` in the word and in the same column
    otherwise. Runs separated by an empty diagonal must be pairwise
    incomparable; each later run is slid along (1, 1) into the feasible range.
    The first letter of the word lands on b(i, 0).
    """
    bad = alternation_violation(w)
    if bad is not None:
        raise NotAlternatingError(bad)
    n = w.n
    letters = np.asarray(w.letters, dtype=np.int64)
    K = letters.size
    if K == 0:
        return Shape(n, [], [], "from_word"), LinearExtension(n, ())
    counts = np.bincount(letters, minlength=n)[1:]
    first = np.full(n + 1, K, dtype=np.int64)
    np.minimum.at(first, letters, np.arange(K))

    # rank of each letter among the letters on its diagonal
    rank = np.empty(K, dtype=np.int64)
    seen = np.zeros(n + 1, dtype=np.int64)
    for j, a in enumerate(letters):
        rank[j] = seen[a]
        seen[a] += 1

    start = np.zeros(n + 1, dtype=np.int64)
    comp_of = np.zeros(n + 1, dtype=np.int64)
    runs = _components(counts)
    for c, (lo, hi) in enumerate(runs):
        comp_of[lo:hi + 1] = c
        for i in range(lo, hi):
            start[i + 1] = start[i] + (1 if first[i] < first[i + 1] else 0)

    xs = start[letters] + rank
    ys = xs - letters
    shift = np.zeros(len(runs), dtype=np.int64)
    for c, (lo, hi) in enumerate(runs):
        members = (letters >= lo) & (letters <= hi)
        j0 = int(np.argmax(members))
        anchor = int(letters[j0]) - int(xs[j0])
        if c == 0:
            shift[c] = anchor
            continue
        prev = letters < lo
        px = xs[prev] + shift[comp_of[letters[prev]]]
        py = ys[prev] + shift[comp_of[letters[prev]]]
        k_lo = int(px.max() - xs[members].min() + 1)
        k_hi = int(py.min() - ys[members].max() - 1)
        if k_lo > k_hi:
            raise ShapeError(f"cannot place diagonals {lo}..{hi} incomparably with earlier boxes")
        shift[c] = min(max(anchor, k_lo), k_hi)
    xs = xs + shift[comp_of[letters]]
    ys = ys + shift[comp_of[letters]]

    shape = Shape(n, xs, ys, "from_word")
    if not is_order_convex(shape):
        raise ShapeError("alternating word produced a shape that is not order-convex")
    ext = LinearExtension(n, tuple(BoxCoord(int(x), int(y)) for x, y in zip(xs, ys)))
    return shape, ext


def diagonal_counts(s: Shape) -> np.ndarray:
    """O_i for i = 1..n-1 (index 0 holds O_1)."""
    return np.bincount(s.diagonals, minlength=s.n)[1:].astype(np.int64)


def _grid(s: Shape):
    x0, y0 = int(s.xs.min()), int(s.ys.min())
    g = np.zeros((int(s.xs.max()) - x0 + 1, int(s.ys.max()) - y0 + 1), dtype=bool)
    g[s.xs - x0, s.ys - y0] = True
    return g, x0, y0


def is_order_convex(s: Shape) -> bool:
    """No in-rank box outside ``s`` lies between two boxes of ``s``.

    Two cumulative-OR sweeps over the bounding box give, for every cell,
    whether some box of ``s`` is weakly below-left of it and whether some box
    is weakly above-right of it.
    """
    if len(s) <= 1:
        return True
    g, x0, y0 = _grid(s)
    below = np.logical_or.accumulate(np.logical_or.accumulate(g, axis=0), axis=1)
    above = np.logical_or.accumulate(np.logical_or.accumulate(g[::-1, ::-1], axis=0), axis=1)[::-1, ::-1]
    gx = np.arange(g.shape[0])[:, None] + x0
    gy = np.arange(g.shape[1])[None, :] + y0
    d = gx - gy
    holes = ~g & below & above & (d >= 1) & (d <= s.n - 1)
    return not bool(holes.any())


def is_serrated(s: Shape) -> bool:
    if len(s) == 0:
        return False
    levels = s.levels
    c = int(levels.min())
    need = sum(1 for d in range(1, s.n) if (d - c) % 2 == 0)
    return int(np.count_nonzero(levels == c)) == need


def canonical_linear_extension(s: Shape) -> LinearExtension:
    return LinearExtension(s.n, tuple(s.boxes()))


def hypothesis_report(s: Shape, epsilon: float = 0.05) -> ShapeDiagnostics:
    if not 0.0 < epsilon < 0.5:
        raise ValueError(f"epsilon must lie in (0, 0.5), got {epsilon}")
    counts = diagonal_counts(s)
    n = s.n
    max_count = int(counts.max()) if counts.size else 0
    small = int(np.count_nonzero(counts <= n ** (2 * epsilon)))
    scale = n * n / math.log(n) ** (1 + epsilon)
    return ShapeDiagnostics(n, max_count, small, max_count / scale, epsilon)
