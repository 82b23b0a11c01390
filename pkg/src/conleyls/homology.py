"""Cubical chain complexes of grid cell sets over GF(2).

An elementary cube is a tuple of doubled coordinates: an even entry ``2k``
is the degenerate interval at grid vertex ``k`` and an odd entry ``2k+1``
is the edge between vertices ``k`` and ``k+1``.  Periodic axes wrap the
doubled coordinate modulo ``2n``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from . import gf2
from .grid import Grid

Cube = tuple[int, ...]


def cube_dim(q: Cube) -> int:
    return sum(x & 1 for x in q)


def cell_cube(grid: Grid, c: int) -> Cube:
    return tuple(2 * k + 1 for k in grid.cell(c))


def _wrap(grid: Grid, a: int, x: int) -> int:
    return x % (2 * grid.subdivisions[a]) if grid.periodic[a] else x


def facets(grid: Grid, q: Cube) -> list[Cube]:
    out = []
    for a, x in enumerate(q):
        if x & 1:
            for y in (x - 1, x + 1):
                f = list(q)
                f[a] = _wrap(grid, a, y)
                out.append(tuple(f))
    return out


def closure(grid: Grid, cubes: Iterable[Cube]) -> frozenset[Cube]:
    seen = set(cubes)
    stack = list(seen)
    while stack:
        q = stack.pop()
        for f in facets(grid, q):
            if f not in seen:
                seen.add(f)
                stack.append(f)
    return frozenset(seen)


def hull(grid: Grid, cells: Iterable[int]) -> frozenset[Cube]:
    """All faces of the given top cells."""
    return closure(grid, (cell_cube(grid, c) for c in cells))


@dataclass(frozen=True)
class CubicalPair:
    grid: Grid
    cubes_n: frozenset[Cube] = field(repr=False)
    cubes_l: frozenset[Cube] = field(repr=False)
    chains: tuple[tuple[Cube, ...], ...] = field(repr=False)
    boundary: tuple[tuple[int, ...], ...] = field(repr=False)
    """``boundary[k][i]``: bitset over ``chains[k-1]`` of the faces of ``chains[k][i]``."""

    @property
    def dim(self) -> int:
        return self.grid.dim

    def counts(self) -> list[int]:
        return [len(ch) for ch in self.chains]

    def euler(self) -> int:
        return sum((-1) ** k * n for k, n in enumerate(self.counts()))

    def check_dd(self) -> bool:
        for k in range(2, self.dim + 1):
            lower = self.boundary[k - 1]
            for col in self.boundary[k]:
                acc = 0
                bits = col
                while bits:
                    low = bits & -bits
                    acc ^= lower[low.bit_length() - 1]
                    bits ^= low
                if acc:
                    return False
        return True


def relative_complex(grid: Grid, cubes_n, cubes_l) -> CubicalPair:
    cubes_n = frozenset(cubes_n)
    cubes_l = frozenset(cubes_l)
    if not cubes_l <= cubes_n:
        raise ValueError("L-cubes must lie in N-cubes")
    rel = cubes_n - cubes_l
    chains = tuple(tuple(sorted(q for q in rel if cube_dim(q) == k)) for k in range(grid.dim + 1))
    index = [{q: i for i, q in enumerate(ch)} for ch in chains]
    boundary = [tuple(0 for _ in chains[0])]
    for k in range(1, grid.dim + 1):
        cols = []
        for q in chains[k]:
            b = 0
            for f in facets(grid, q):
                i = index[k - 1].get(f)
                if i is not None:
                    b ^= 1 << i
            cols.append(b)
        boundary.append(tuple(cols))
    return CubicalPair(grid, cubes_n, cubes_l, chains, tuple(boundary))


def build_pair(grid: Grid, N: Iterable[int], L: Iterable[int] = ()) -> CubicalPair:
    """Relative cubical complex of the closed hulls of N and L."""
    N = frozenset(N)
    L = frozenset(L)
    if not L <= N:
        raise ValueError(f"L is not contained in N: {sorted(L - N)[:5]}")
    pair = relative_complex(grid, hull(grid, N), hull(grid, L))
    assert pair.check_dd()
    return pair


def relative_betti(pair: CubicalPair, backend=None) -> tuple[int, ...]:
    ranks = [0] + [gf2.rank(pair.boundary[k], backend) for k in range(1, pair.dim + 1)] + [0]
    return tuple(len(pair.chains[k]) - ranks[k] - ranks[k + 1] for k in range(pair.dim + 1))
