"""Greedy free-face collapses of closed cubical complexes."""
from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Iterable

from .grid import Grid
from .homology import Cube, closure, cube_dim, facets, hull


@dataclass(frozen=True)
class Collapse:
    """Elementary collapses ``(free face, coface)`` ending at ``vertex``."""

    steps: tuple[tuple[Cube, Cube], ...]
    vertex: Cube

    def __len__(self):
        return len(self.steps)


def collapse_complex(grid: Grid, cubes: Iterable[Cube]) -> Collapse | None:
    """Collapse a closed complex to one vertex, or None if greedy collapsing
    gets stuck.  Free faces of lowest dimension go first."""
    alive = set(closure(grid, cubes))
    if not alive:
        return None
    cofaces: dict[Cube, set[Cube]] = {q: set() for q in alive}
    for q in alive:
        for f in facets(grid, q):
            cofaces[f].add(q)
    heap = [(cube_dim(q), q) for q in alive if len(cofaces[q]) == 1]
    heapq.heapify(heap)
    steps = []
    while heap:
        _, f = heapq.heappop(heap)
        if f not in alive or len(cofaces[f]) != 1:
            continue
        (q,) = cofaces[f]
        alive.discard(f)
        alive.discard(q)
        steps.append((f, q))
        for g in facets(grid, q):
            if g in alive:
                cofaces[g].discard(q)
                if len(cofaces[g]) == 1:
                    heapq.heappush(heap, (cube_dim(g), g))
        for g in facets(grid, f):
            if g in alive:
                cofaces[g].discard(f)
                if len(cofaces[g]) == 1:
                    heapq.heappush(heap, (cube_dim(g), g))
    if len(alive) == 1:
        (v,) = alive
        if cube_dim(v) == 0:
            return Collapse(tuple(steps), v)
    return None


def collapsible(grid: Grid, cells: Iterable[int]) -> Collapse | None:
    """Collapse certificate for the closed hull of ``cells``.

    None means "unknown", not "non-contractible".
    """
    cells = list(cells)
    if not cells:
        raise ValueError("cannot collapse an empty cell set")
    return collapse_complex(grid, hull(grid, cells))
