"""Polyomino tile chemistry.

Molecules are edge-connected sets of unit lattice squares.  Two colliding
tiles join when some placement makes them share an edge without leaving a
hole; otherwise both are discarded.  Since a product always has the summed
area, no tile can ever reproduce its own shape and size, but a scaled copy
of a shape can appear.
"""
from __future__ import annotations

import json
import math
from typing import Iterable, Optional

import numpy as np

Cell = tuple[int, int]
NEIGHBOURS = ((1, 0), (-1, 0), (0, 1), (0, -1))

_ROTATIONS = (
    lambda x, y: (x, y),
    lambda x, y: (-y, x),
    lambda x, y: (-x, -y),
    lambda x, y: (y, -x),
)
_REFLECTIONS = tuple((lambda f: (lambda x, y: f(-x, y)))(f) for f in _ROTATIONS)


def _normalize(cells: Iterable[Cell]) -> tuple[Cell, ...]:
    cells = list(cells)
    mx = min(x for x, _ in cells)
    my = min(y for _, y in cells)
    return tuple(sorted((x - mx, y - my) for x, y in cells))


def _connected(cells: frozenset) -> bool:
    start = next(iter(cells))
    seen = {start}
    todo = [start]
    while todo:
        x, y = todo.pop()
        for dx, dy in NEIGHBOURS:
            n = (x + dx, y + dy)
            if n in cells and n not in seen:
                seen.add(n)
                todo.append(n)
    return len(seen) == len(cells)


def has_hole(cells) -> bool:
    """True if some empty cell is enclosed, i.e. not 4-connected to the outside.

    ``cells`` must be edge-connected.  Uses the Euler characteristic of the
    union of closed unit squares: holes = edges - vertices - faces + 1.
    """
    cells = set(cells)
    if len(cells) < 7:  # no polyomino with fewer than 7 cells encloses a hole
        return False
    verts = set()
    edges = set()
    for x, y in cells:
        verts.update(((x, y), (x + 1, y), (x, y + 1), (x + 1, y + 1)))
        edges.update(((x, y, 0), (x, y + 1, 0), (x, y, 1), (x + 1, y, 1)))
    return len(edges) - len(verts) - len(cells) + 1 > 0


def flood_has_hole(cells) -> bool:
    """Reference hole test by flood fill from outside the padded bounding box."""
    cells = set(cells)
    xs = [x for x, _ in cells]
    ys = [y for _, y in cells]
    x0, x1, y0, y1 = min(xs) - 1, max(xs) + 1, min(ys) - 1, max(ys) + 1
    seen = {(x0, y0)}
    todo = [(x0, y0)]
    while todo:
        x, y = todo.pop()
        for dx, dy in NEIGHBOURS:
            n = (x + dx, y + dy)
            if x0 <= n[0] <= x1 and y0 <= n[1] <= y1 and n not in cells and n not in seen:
                seen.add(n)
                todo.append(n)
    return len(seen) + len(cells) < (x1 - x0 + 1) * (y1 - y0 + 1)


class Tile:
    """A polyomino stored translated to the origin with sorted cells."""

    __slots__ = ("cells", "_set", "_hash")

    def __init__(self, cells: Iterable[Cell]):
        cells = list(cells)
        if not cells:
            raise ValueError("a tile needs at least one cell")
        norm = _normalize(cells)
        if len(set(norm)) != len(norm):
            raise ValueError("duplicate cells")
        self._set = frozenset(norm)
        if not _connected(self._set):
            raise ValueError("tile cells are not edge-connected")
        self.cells = norm
        self._hash = hash(norm)

    @classmethod
    def _joined(cls, cells) -> "Tile":
        # union of two tiles sharing an edge: connected and duplicate-free
        t = cls.__new__(cls)
        t.cells = _normalize(cells)
        t._set = frozenset(t.cells)
        t._hash = hash(t.cells)
        return t

    @property
    def area(self) -> int:
        return len(self.cells)

    @property
    def width(self) -> int:
        return max(x for x, _ in self.cells) + 1

    @property
    def height(self) -> int:
        return max(y for _, y in self.cells) + 1

    def __eq__(self, other):
        if not isinstance(other, Tile):
            return NotImplemented
        return self.cells == other.cells

    def __hash__(self):
        return self._hash

    def __contains__(self, cell):
        return cell in self._set

    def grid(self) -> str:
        """Rows of ``#``/``.``, row index = y, column = x."""
        rows = [["."] * self.width for _ in range(self.height)]
        for x, y in self.cells:
            rows[y][x] = "#"
        return "\n".join("".join(r) for r in rows)

    @property
    def key(self) -> str:
        return self.grid().replace("\n", "/")

    def to_json(self) -> str:
        return json.dumps({"grid": self.grid(), "cells": [list(c) for c in self.cells]})

    @classmethod
    def from_grid(cls, text: str) -> "Tile":
        rows = [r.strip() for r in text.replace("/", "\n").splitlines() if r.strip()]
        cells = []
        for y, row in enumerate(rows):
            for x, ch in enumerate(row):
                if ch == "#":
                    cells.append((x, y))
                elif ch != ".":
                    raise ValueError(f"bad tile character {ch!r}")
        return cls(cells)

    def __repr__(self):
        return f"Tile({self.key!r})"


def transforms(use_rotations: bool, use_reflections: bool):
    if use_reflections:
        return _ROTATIONS + _REFLECTIONS if use_rotations else (_ROTATIONS[0], _REFLECTIONS[0])
    return _ROTATIONS if use_rotations else _ROTATIONS[:1]


def canonical(tile: Tile, use_rotations=False, use_reflections=False) -> tuple[Cell, ...]:
    """Canonical cell tuple under translation plus the chosen symmetries."""
    return min(_normalize(f(x, y) for x, y in tile.cells)
               for f in transforms(use_rotations, use_reflections))


def scale(tile: Tile, k: int) -> Tile:
    """Replace every cell by a k-by-k block."""
    return Tile((k * x + i, k * y + j) for x, y in tile.cells
                for i in range(k) for j in range(k))


def same_shape_and_size(a: Tile, b: Tile, use_rotations=False, use_reflections=False) -> bool:
    if a.area != b.area:
        return False
    return canonical(a, use_rotations, use_reflections) == canonical(b, use_rotations, use_reflections)


def same_shape_ignoring_size(a: Tile, b: Tile, use_rotations=False,
                             use_reflections=False) -> Optional[int]:
    """Block-scale factor k relating the smaller tile to the larger one, or None."""
    small, large = (a, b) if a.area <= b.area else (b, a)
    if large.area % small.area:
        return None
    k = math.isqrt(large.area // small.area)
    if k * k * small.area != large.area:
        return None
    target = canonical(large, use_rotations, use_reflections)
    if canonical(scale(small, k), use_rotations, use_reflections) == target:
        return k
    return None


def primitive(tile: Tile) -> tuple[Tile, int]:
    """Smallest tile that block-scales to ``tile``, with the scale factor."""
    for k in range(min(tile.width, tile.height), 1, -1):
        if tile.area % (k * k) or tile.width % k or tile.height % k:
            continue
        blocks = {(x // k, y // k) for x, y in tile.cells}
        if len(blocks) * k * k == tile.area:
            return Tile(blocks), k
    return tile, 1


def shape_class_key(tile: Tile, use_rotations=False, use_reflections=False) -> str:
    """Key shared by all block-scalings of one shape."""
    root, _ = primitive(tile)
    return Tile(canonical(root, use_rotations, use_reflections)).key


def placements(a: Tile, b: Tile, offsets: Optional[Iterable[Cell]] = None) -> list[Tile]:
    """All distinct hole-free unions of ``a`` with a translate of ``b`` sharing an edge.

    By default only offsets that bring some b-cell edge-adjacent to some
    a-cell are tried; every other offset in the bounding-box window fails
    the shared-edge condition anyway.  ``offsets`` restricts the search.
    """
    aset = a._set
    rim = {(x + dx, y + dy) for x, y in a.cells for dx, dy in NEIGHBOURS} - aset
    if offsets is None:
        offsets = {(rx - bx, ry - by) for rx, ry in rim for bx, by in b.cells}
    products = set()
    for ox, oy in sorted(set(offsets)):
        moved = {(x + ox, y + oy) for x, y in b.cells}
        if not aset.isdisjoint(moved) or rim.isdisjoint(moved):
            continue
        union = aset | moved
        if has_hole(union):
            continue
        products.add(Tile._joined(union))
    return sorted(products, key=lambda t: t.cells)


def collide_tiles(a: Tile, b: Tile, rng: np.random.Generator,
                  offsets: Optional[Iterable[Cell]] = None) -> Optional[Tile]:
    """Join ``a`` and ``b`` at a uniformly chosen valid fit, or None if none fits."""
    options = placements(a, b, offsets)
    if not options:
        return None
    return options[int(rng.integers(len(options)))]


def random_tile(rng: np.random.Generator, area: int) -> Tile:
    """Random hole-free polyomino grown cell by cell from the origin."""
    while True:
        cells = [(0, 0)]
        present = {(0, 0)}
        while len(cells) < area:
            x, y = cells[int(rng.integers(len(cells)))]
            dx, dy = NEIGHBOURS[int(rng.integers(4))]
            n = (x + dx, y + dy)
            if n not in present:
                present.add(n)
                cells.append(n)
        if not has_hole(cells):
            return Tile(cells)


SQUARE = Tile([(0, 0)])
L_TROMINO = Tile([(0, 0), (0, 1), (1, 0)])
