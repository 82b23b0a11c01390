"""Cubical grids and multivalued combinatorial maps on their top cells.

Cells are addressed by flat integer indices in C order, so sorting flat
indices sorts the multi-indices lexicographically.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

#: Image token for enclosures that leave a non-periodic box.
EXTERIOR = -1


class GridError(ValueError):
    pass


class MapError(ValueError):
    pass


@dataclass(frozen=True)
class Grid:
    box: tuple[tuple[float, float], ...]
    subdivisions: tuple[int, ...]
    periodic: tuple[bool, ...]

    def __post_init__(self):
        if not (len(self.box) == len(self.subdivisions) == len(self.periodic)):
            raise GridError("box, subdivisions and periodic must have equal length")
        if not self.box:
            raise GridError("grid needs at least one axis")
        for a, (lo, hi) in enumerate(self.box):
            if not hi > lo:
                raise GridError(f"axis {a}: interval [{lo}, {hi}] has nonpositive length")
        for a, n in enumerate(self.subdivisions):
            if n < 1:
                raise GridError(f"axis {a}: subdivision count {n} < 1")

    @property
    def dim(self) -> int:
        return len(self.subdivisions)

    @cached_property
    def size(self) -> int:
        return int(np.prod(self.subdivisions))

    @cached_property
    def widths(self) -> np.ndarray:
        return np.array([(hi - lo) / n for (lo, hi), n in zip(self.box, self.subdivisions)])

    @cached_property
    def origin(self) -> np.ndarray:
        return np.array([lo for lo, _ in self.box], dtype=float)

    @cached_property
    def _strides(self) -> tuple[int, ...]:
        strides = [1] * self.dim
        for a in range(self.dim - 2, -1, -1):
            strides[a] = strides[a + 1] * self.subdivisions[a + 1]
        return tuple(strides)

    def index(self, multi: Sequence[int]) -> int:
        if len(multi) != self.dim:
            raise GridError(f"multi-index {tuple(multi)} has wrong length")
        flat = 0
        for a, (k, n) in enumerate(zip(multi, self.subdivisions)):
            k = int(k)
            if self.periodic[a]:
                k %= n
            elif not 0 <= k < n:
                raise GridError(f"cell index {tuple(multi)} out of range")
            flat += k * self._strides[a]
        return flat

    def cell(self, flat: int) -> tuple[int, ...]:
        if not 0 <= flat < self.size:
            raise GridError(f"flat cell index {flat} out of range")
        out = []
        for s in self._strides:
            q, flat = divmod(flat, s)
            out.append(q)
        return tuple(out)

    @cached_property
    def multi_indices(self) -> np.ndarray:
        """(size, dim) array of all multi-indices in flat order."""
        grids = np.meshgrid(*[np.arange(n) for n in self.subdivisions], indexing="ij")
        return np.stack([g.ravel() for g in grids], axis=1)

    def lower_corners(self) -> np.ndarray:
        return self.origin + self.multi_indices * self.widths

    def shift(self, flat: int, offset: Sequence[int]) -> int | None:
        """Cell at ``flat + offset``; None when it falls off a non-periodic axis."""
        multi = self.cell(flat)
        out = []
        for a, (k, d) in enumerate(zip(multi, offset)):
            k += d
            n = self.subdivisions[a]
            if self.periodic[a]:
                k %= n
            elif not 0 <= k < n:
                return None
            out.append(k)
        return self.index(out)

    @cached_property
    def _offsets(self):
        return [o for o in itertools.product((-1, 0, 1), repeat=self.dim) if any(o)]

    def neighbors(self, flat: int) -> tuple[set[int], bool]:
        """Cells sharing at least a vertex with ``flat``, and whether any such
        neighbor would lie outside a non-periodic box."""
        out = set()
        outside = False
        for o in self._offsets:
            c = self.shift(flat, o)
            if c is None:
                outside = True
            elif c != flat:
                out.add(c)
        return out, outside

    def ring(self, cells: Iterable[int], k: int = 1) -> frozenset[int]:
        """``k``-fold vertex-neighborhood of ``cells`` (includes ``cells``)."""
        cur = set(cells)
        for _ in range(k):
            nxt = set(cur)
            for c in cur:
                nxt |= self.neighbors(c)[0]
            cur = nxt
        return frozenset(cur)

    def collar(self, cells: Iterable[int]) -> frozenset[int]:
        """Cells of ``cells`` with a neighbor outside ``cells`` or outside the box."""
        cells = frozenset(cells)
        out = []
        for c in cells:
            nbrs, outside = self.neighbors(c)
            if outside or not nbrs <= cells:
                out.append(c)
        return frozenset(out)

    def to_multi(self, cells: Iterable[int]) -> list[list[int]]:
        return [list(self.cell(c)) for c in sorted(cells)]

    def to_json(self) -> dict:
        return {
            "box": [list(b) for b in self.box],
            "subdivisions": list(self.subdivisions),
            "periodic": list(self.periodic),
        }


def build_grid(box, subdivisions, periodic=None) -> Grid:
    """Validated :class:`Grid`; every axis needs at least two cells."""
    box = tuple((float(lo), float(hi)) for lo, hi in box)
    subdivisions = tuple(int(n) for n in subdivisions)
    if periodic is None:
        periodic = (False,) * len(subdivisions)
    periodic = tuple(bool(p) for p in periodic)
    for a, n in enumerate(subdivisions):
        if n < 2:
            raise GridError(f"axis {a}: subdivision count {n} < 2")
    return Grid(box, subdivisions, periodic)


@dataclass(frozen=True)
class CombinatorialMap:
    """Multivalued map on the top cells of ``grid``.

    ``images[c]`` is a frozenset of flat cell indices, possibly containing
    :data:`EXTERIOR`.
    """

    grid: Grid
    images: tuple[frozenset[int], ...]
    step: float | None = None
    meta: dict = field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self):
        if len(self.images) != self.grid.size:
            raise MapError(f"{len(self.images)} image sets for {self.grid.size} cells")
        for c, img in enumerate(self.images):
            if not img:
                raise MapError(f"cell {self.grid.cell(c)} has an empty image")
            for d in img:
                if d != EXTERIOR and not 0 <= d < self.grid.size:
                    raise MapError(f"cell {self.grid.cell(c)} maps to invalid index {d}")

    def __call__(self, c: int) -> frozenset[int]:
        return self.images[c]

    def image_of(self, cells: Iterable[int]) -> frozenset[int]:
        out = set()
        for c in cells:
            out |= self.images[c]
        return frozenset(out)

    @cached_property
    def preimages(self) -> tuple[frozenset[int], ...]:
        pre = [set() for _ in range(self.grid.size)]
        for c, img in enumerate(self.images):
            for d in img:
                if d != EXTERIOR:
                    pre[d].add(c)
        return tuple(frozenset(p) for p in pre)

    def to_json(self) -> dict:
        doc = self.grid.to_json()
        doc["cells"] = doc.pop("subdivisions")
        doc["images"] = {
            ",".join(map(str, self.grid.cell(c))): [
                "exterior" if d == EXTERIOR else list(self.grid.cell(d)) for d in sorted(img)
            ]
            for c, img in enumerate(self.images)
        }
        return doc


def _as_flat(grid: Grid, cell) -> int:
    if isinstance(cell, (int, np.integer)):
        if not 0 <= cell < grid.size:
            raise MapError(f"cell index {cell} out of range")
        return int(cell)
    try:
        return grid.index(tuple(cell))
    except GridError as exc:
        raise MapError(str(exc)) from None


def explicit_map(grid: Grid, pairs, step=None) -> CombinatorialMap:
    """Map with exactly the given images.

    ``pairs`` is an iterable of ``(cell, images)``; cells may be flat indices
    or multi-indices and images may contain ``"exterior"``.
    """
    table: dict[int, frozenset[int]] = {}
    for cell, imgs in pairs:
        c = _as_flat(grid, cell)
        if c in table:
            raise MapError(f"cell {grid.cell(c)} listed twice")
        out = set()
        for d in imgs:
            if isinstance(d, str):
                if d.lower() != "exterior":
                    raise MapError(f"unknown image token {d!r}")
                out.add(EXTERIOR)
            else:
                out.add(_as_flat(grid, d))
        if not out:
            raise MapError(f"cell {grid.cell(c)} has an empty image")
        table[c] = frozenset(out)
    missing = [grid.cell(c) for c in range(grid.size) if c not in table]
    if missing:
        raise MapError(f"cells without images: {missing[:5]}")
    return CombinatorialMap(grid, tuple(table[c] for c in range(grid.size)), step)


def load_map_json(source) -> CombinatorialMap:
    """Read an explicit map document (path, file object, or dict)."""
    if isinstance(source, dict):
        doc = source
    elif hasattr(source, "read"):
        doc = json.load(source)
    else:
        with open(source) as fh:
            doc = json.load(fh)
    counts = [int(n) for n in doc["cells"]]
    periodic = doc.get("periodic") or [False] * len(counts)
    box = doc.get("box") or [[0.0, float(n)] for n in counts]
    grid = Grid(tuple(map(tuple, box)), tuple(counts), tuple(map(bool, periodic)))
    pairs = []
    for key, imgs in doc["images"].items():
        cell = tuple(int(k) for k in str(key).split(","))
        pairs.append((cell, [d if isinstance(d, str) else tuple(d) for d in imgs]))
    return explicit_map(grid, pairs, doc.get("step"))
