"""Pipe dreams: a shape whose boxes each hold a cross tile or a bump tile.

Two independent routes to the represented permutation are provided.
``permutation_product`` reads the cross tiles as a word in canonical box
order and multiplies it out. ``trace`` follows every pipe box by box
through the tiles and boundary elbows, and also records which pairs of
pipes meet and how often they cross.

Frontier positions: the west edge of a box on diagonal ``d`` sits at
position ``d``, its south edge at ``d + 1``; the north edge is position
``d`` and the east edge ``d + 1``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import UnsupportedShapeError
from .rng import as_stream
from .shape import BoxCoord, Shape, is_order_convex
from .word import Perm, Word

TILE_STREAM = "pipedream"


@dataclass(frozen=True, eq=False)
class PipeDream:
    shape: Shape
    cross: np.ndarray  # bool, canonical box order

    def __post_init__(self):
        cross = np.asarray(self.cross, dtype=bool).ravel()
        if cross.size != len(self.shape):
            raise ValueError(f"expected {len(self.shape)} tiles, got {cross.size}")
        cross.setflags(write=False)
        object.__setattr__(self, "cross", cross)

    @property
    def n(self) -> int:
        return self.shape.n

    def is_cross(self, x: int, y: int) -> bool:
        return bool(self.cross[self.shape.index[(x, y)]])

    def cross_word(self) -> Word:
        """Diagonals of the cross tiles in canonical order."""
        return Word(self.n, self.shape.diagonals[self.cross].tolist())

    def __eq__(self, other) -> bool:
        if not isinstance(other, PipeDream):
            return NotImplemented
        return self.shape == other.shape and np.array_equal(self.cross, other.cross)

    def to_json(self) -> dict:
        return {"shape": self.shape.to_json(), "cross": [int(c) for c in self.cross]}


def sample(s: Shape, p: float, rng) -> PipeDream:
    """Independent Bernoulli(p) cross tiles, drawn in canonical box order."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    stream = as_stream(rng, TILE_STREAM)
    return PipeDream(s, stream.random(len(s)) < p)


def from_tiles(s: Shape, cross) -> PipeDream:
    return PipeDream(s, cross)


def permutation_product(pd: PipeDream) -> Perm:
    perm = kernels.apply_swaps(
        np.ascontiguousarray(pd.shape.diagonals, dtype=np.int32),
        np.ascontiguousarray(pd.cross, dtype=np.uint8),
        pd.n,
    )
    return Perm(perm.tolist())


def inversion_count(pd: PipeDream) -> int:
    perm = kernels.apply_swaps(
        np.ascontiguousarray(pd.shape.diagonals, dtype=np.int32),
        np.ascontiguousarray(pd.cross, dtype=np.uint8),
        pd.n,
    )
    return int(kernels.count_inversions(perm))


@dataclass(frozen=True)
class Edge:
    """A boundary edge of a box: side is 'W', 'S', 'N' or 'E'; None for a length-0 pipe."""

    position: int
    box: BoxCoord | None
    side: str | None


@dataclass(frozen=True)
class Visit:
    box: BoxCoord
    enter: str  # 'W' or 'S'
    exit: str  # 'N' or 'E'
    cross: bool


@dataclass(frozen=True, eq=False)
class Routing:
    n: int
    entries: tuple[Edge, ...]  # indexed by label - 1, NW to SE
    exits: tuple[Edge, ...]  # indexed by exit position - 1
    paths: tuple[tuple[Visit, ...], ...]  # indexed by label - 1
    crossings: np.ndarray  # symmetric n x n, labels 1..n at index label - 1
    kisses: np.ndarray
    permutation: Perm

    @property
    def pipe_count(self) -> int:
        return self.n

    @property
    def lengths(self) -> list[int]:
        """R_q = visits - 1, so a length-0 pipe reports -1."""
        return [len(path) - 1 for path in self.paths]

    def inverted_pairs(self) -> list[tuple[int, int]]:
        iu = np.argwhere(np.triu(self.crossings % 2 == 1, 1))
        return [(int(a) + 1, int(b) + 1) for a, b in iu]


def _entry_edges(s: Shape) -> dict[int, Edge]:
    n = s.n
    found: dict[int, Edge] = {}
    for b in s.boxes():
        x, y = b
        d = x - y
        fed = (x - 1, y - 1) in s
        if (x - 1, y) not in s and not (d == 1 and fed):
            found.setdefault(d, Edge(d, b, "W"))
            if found[d].box != b:
                raise UnsupportedShapeError(f"two entry edges at position {d}")
        if (x, y - 1) not in s and not (d == n - 1 and fed):
            found.setdefault(d + 1, Edge(d + 1, b, "S"))
            if found[d + 1].box != b:
                raise UnsupportedShapeError(f"two entry edges at position {d + 1}")
    return found


def _follow(pd: PipeDream, box: BoxCoord, side: str):
    """Walk one pipe from an entry edge; returns its visits and exit edge."""
    s = pd.shape
    n = s.n
    visits = []
    x, y = box
    while True:
        d = x - y
        c = pd.is_cross(x, y)
        out = ("E" if side == "W" else "N") if c else ("N" if side == "W" else "E")
        visits.append(Visit(BoxCoord(x, y), side, out, c))
        if out == "E":
            if (x + 1, y) in s:
                x, side = x + 1, "W"
                continue
            if d == n - 1 and (x + 1, y + 1) in s:
                x, y, side = x + 1, y + 1, "S"
                continue
            return visits, Edge(d + 1, BoxCoord(x, y), "E")
        if (x, y + 1) in s:
            y, side = y + 1, "S"
            continue
        if d == 1 and (x + 1, y + 1) in s:
            x, y, side = x + 1, y + 1, "W"
            continue
        return visits, Edge(d, BoxCoord(x, y), "N")


def trace(pd: PipeDream) -> Routing:
    """Follow each pipe geometrically from its southwest entry to its northeast exit."""
    s = pd.shape
    n = s.n
    if not is_order_convex(s):
        raise UnsupportedShapeError("pipe tracing needs an order-convex shape")
    starts = _entry_edges(s)
    entries: list[Edge] = []
    paths: list[tuple[Visit, ...]] = []
    exits: dict[int, tuple[int, Edge]] = {}
    crossings = np.zeros((n, n), dtype=np.int64)
    kisses = np.zeros((n, n), dtype=np.int64)
    occupant: dict[BoxCoord, int] = {}
    for label in range(1, n + 1):
        if label in starts:
            e = starts[label]
            visits, ex = _follow(pd, e.box, e.side)
        else:
            e = Edge(label, None, None)
            visits, ex = [], Edge(label, None, None)
        entries.append(e)
        paths.append(tuple(visits))
        if ex.position in exits:
            raise UnsupportedShapeError(f"two pipes leave through position {ex.position}")
        exits[ex.position] = (label, ex)
        for v in visits:
            other = occupant.get(v.box)
            if other is None:
                occupant[v.box] = label
                continue
            if other < 0:
                raise UnsupportedShapeError(f"box {tuple(v.box)} visited three times")
            kisses[other - 1, label - 1] += 1
            kisses[label - 1, other - 1] += 1
            if v.cross:
                crossings[other - 1, label - 1] += 1
                crossings[label - 1, other - 1] += 1
            occupant[v.box] = -1
    if sorted(exits) != list(range(1, n + 1)):
        raise UnsupportedShapeError("exit positions do not cover 1..n")
    if len(occupant) != len(s) or any(v >= 0 for v in occupant.values()):
        raise UnsupportedShapeError("some box is not visited by exactly two pipes")
    perm = Perm(exits[k][0] for k in range(1, n + 1))
    return Routing(
        n=n,
        entries=tuple(entries),
        exits=tuple(exits[k][1] for k in range(1, n + 1)),
        paths=tuple(paths),
        crossings=crossings,
        kisses=kisses,
        permutation=perm,
    )
