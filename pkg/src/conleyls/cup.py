"""Cup length of a cubical pair via its staircase triangulation.

Each elementary cube with lower corner ``v`` and free axes ``a_1..a_k`` is
split into the k! simplices ``v, v+e_{p1}, v+e_{p1}+e_{p2}, ...`` for the
permutations ``p`` of its axes.  Vertices are numbered in lexicographic
order and simplices are sorted vertex tuples, which fixes the front/back
face convention for the cup product.
"""
from __future__ import annotations

import itertools

from . import gf2
from .grid import Grid
from .homology import CubicalPair, Cube


def _vertex_shape(grid: Grid) -> tuple[int, ...]:
    return tuple(n if p else n + 1 for n, p in zip(grid.subdivisions, grid.periodic))


def _vertex_id(grid: Grid, coords) -> int:
    flat = 0
    for a, (k, m) in enumerate(zip(coords, _vertex_shape(grid))):
        if grid.periodic[a]:
            k %= m
        flat = flat * m + k
    return flat


def staircase(grid: Grid, q: Cube) -> list[tuple[int, ...]]:
    if any(p and n < 3 for n, p in zip(grid.subdivisions, grid.periodic)):
        raise ValueError("periodic axis too short to triangulate; need at least 3 cells")
    base = [x // 2 for x in q]
    axes = [a for a, x in enumerate(q) if x & 1]
    out = []
    for perm in itertools.permutations(axes):
        v = list(base)
        verts = [_vertex_id(grid, v)]
        for a in perm:
            v[a] += 1
            verts.append(_vertex_id(grid, v))
        out.append(tuple(sorted(verts)))
    return out


def triangulate(grid: Grid, cubes) -> frozenset[tuple[int, ...]]:
    top = set()
    for q in cubes:
        top.update(staircase(grid, q))
    out = set()
    for s in top:
        for r in range(1, len(s) + 1):
            out.update(itertools.combinations(s, r))
    return frozenset(out)


class RelativeCochains:
    """GF(2) cochains of a simplicial pair, cochains as bitsets per degree."""

    def __init__(self, simplices_n, simplices_l, top_dim):
        rel = simplices_n - simplices_l
        self.top = top_dim
        self.simplices = [sorted(s for s in rel if len(s) == k + 1) for k in range(top_dim + 1)]
        self.index = [{s: i for i, s in enumerate(ss)} for ss in self.simplices]
        # coboundary of each k-simplex as a bitset over (k+1)-simplices
        self.delta = []
        for k in range(top_dim + 1):
            rows = [0] * len(self.simplices[k])
            if k < top_dim:
                for j, t in enumerate(self.simplices[k + 1]):
                    for drop in range(len(t)):
                        i = self.index[k].get(t[:drop] + t[drop + 1:])
                        if i is not None:
                            rows[i] |= 1 << j
            self.delta.append(rows)
        self._images = {}

    def coboundaries(self, k: int) -> gf2.Echelon:
        """Echelon basis of im(delta_{k-1}) inside C^k."""
        if k not in self._images:
            self._images[k] = gf2.Echelon(self.delta[k - 1] if k > 0 else ())
        return self._images[k]

    def cohomology_basis(self, k: int, backend=None) -> list[int]:
        rows = self.delta[k]
        ncols = len(self.simplices[k + 1]) if k < self.top else 0
        cocycles = gf2.left_kernel(rows, ncols, backend)
        ech = self.coboundaries(k).copy()
        return [z for z in cocycles if ech.add(z)]

    def cup(self, a: int, p: int, b: int, q: int) -> int:
        out = 0
        idx_p = self.index[p]
        idx_q = self.index[q]
        for j, t in enumerate(self.simplices[p + q]):
            i = idx_p.get(t[: p + 1])
            if i is None or not (a >> i) & 1:
                continue
            i2 = idx_q.get(t[p:])
            if i2 is not None and (b >> i2) & 1:
                out |= 1 << j
        return out


def cochains_of(pair: CubicalPair) -> RelativeCochains:
    grid = pair.grid
    tn = triangulate(grid, pair.cubes_n)
    tl = triangulate(grid, pair.cubes_l)
    return RelativeCochains(tn, tl, grid.dim)


def cup_length(pair: CubicalPair, backend=None) -> int:
    """Longest nonzero product of positive-degree classes of H*(N, L; GF(2))."""
    co = cochains_of(pair)
    gens = {k: co.cohomology_basis(k, backend) for k in range(1, co.top + 1)}
    gens = {k: v for k, v in gens.items() if v}
    if not gens:
        return 0
    length = 1
    current = gens
    while True:
        nxt = {}
        spans = {}
        for p, alphas in current.items():
            for q, betas in gens.items():
                deg = p + q
                if deg > co.top:
                    continue
                if deg not in spans:
                    spans[deg] = co.coboundaries(deg).copy()
                for a in alphas:
                    for b in betas:
                        c = co.cup(a, p, b, q)
                        if spans[deg].add(c):
                            nxt.setdefault(deg, []).append(c)
        if not nxt:
            return length
        length += 1
        current = nxt
