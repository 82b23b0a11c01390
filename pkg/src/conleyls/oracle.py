"""Exhaustive HLS-category oracle for tiny ambient complexes.

A carrier is a set of ambient top cells whose closed hull collapses; an
open star of such a carrier is contractible in the ambient space.  The
oracle returns the fewest carriers whose hulls contain every cube of the
target, searching up to ``max_size``.  ``None`` means no certified cover
was found, not that none exists.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from functools import lru_cache

from .collapse import collapsible
from .grid import EXTERIOR, Grid
from .homology import Cube, closure, cube_dim, hull

MAX_AMBIENT = 14


class OracleSizeError(ValueError):
    pass


class _Ambient:
    def __init__(self, grid: Grid, cells):
        self.grid = grid
        self.cells = tuple(sorted(set(cells)))
        if len(self.cells) > MAX_AMBIENT:
            raise OracleSizeError(f"ambient has {len(self.cells)} top cells; the oracle allows {MAX_AMBIENT}")
        if not self.cells:
            raise OracleSizeError("ambient is empty")
        self.pos = {c: i for i, c in enumerate(self.cells)}
        self.hulls = [hull(grid, [c]) for c in self.cells]
        self.star = {}
        for i, h in enumerate(self.hulls):
            for q in h:
                self.star[q] = self.star.get(q, 0) | (1 << i)
        n = len(self.cells)
        self.adj = [0] * n
        for i in range(n):
            for j in range(n):
                if i != j and self.hulls[i] & self.hulls[j]:
                    self.adj[i] |= 1 << j
        self._carriers = None

    def mask_cells(self, mask):
        return [c for i, c in enumerate(self.cells) if mask >> i & 1]

    def connected(self, mask):
        start = mask & -mask
        seen = start
        frontier = start
        while frontier:
            nxt = 0
            bits = frontier
            while bits:
                low = bits & -bits
                nxt |= self.adj[low.bit_length() - 1]
                bits ^= low
            nxt &= mask & ~seen
            seen |= nxt
            frontier = nxt
        return seen == mask

    def carriers(self):
        """Maximal collapsible carriers as bitmasks."""
        if self._carriers is None:
            good = []
            for mask in range(1, 1 << len(self.cells)):
                if self.connected(mask) and collapsible(self.grid, self.mask_cells(mask)) is not None:
                    good.append(mask)
            good.sort(key=lambda m: -bin(m).count("1"))
            maximal = []
            for m in good:
                if not any(m & k == m for k in maximal):
                    maximal.append(m)
            self._carriers = maximal
        return self._carriers

    def cover(self, cubes, max_size):
        """Fewest carriers covering ``cubes`` as a list of masks, or None."""
        needs = []
        for q in cubes:
            s = self.star.get(q)
            if s is None:
                raise ValueError(f"cube {q} is not in the ambient complex")
            needs.append(s)
        needs = sorted(set(needs))
        carriers = self.carriers()

        def search(todo, depth):
            if not todo:
                return []
            if depth == 0:
                return None
            # branch on the most constrained requirement
            pick = min(todo, key=lambda s: sum(1 for m in carriers if m & s))
            for m in carriers:
                if m & pick:
                    rest = [s for s in todo if not s & m]
                    sub = search(rest, depth - 1)
                    if sub is not None:
                        return [m] + sub
            return None

        for k in range(0, max_size + 1):
            found = search(needs, k)
            if found is not None:
                return found
        return None


@lru_cache(maxsize=64)
def _ambient(grid: Grid, cells: frozenset) -> _Ambient:
    return _Ambient(grid, cells)


def _target_cubes(grid, target):
    target = list(target)
    if target and isinstance(target[0], tuple):
        return closure(grid, target)
    return hull(grid, target)


def brute_force_hls(grid: Grid, target, ambient, max_size: int = 4) -> int | None:
    """Minimum number of certified carriers covering ``target``.

    ``target`` is a set of top cells or of elementary cubes; ``ambient`` is
    a set of top cells.
    """
    amb = _ambient(grid, frozenset(ambient))
    cover = amb.cover(_target_cubes(grid, target), max_size)
    return None if cover is None else len(cover)


def optimal_cover(grid: Grid, target, ambient, max_size: int = 4):
    amb = _ambient(grid, frozenset(ambient))
    cover = amb.cover(_target_cubes(grid, target), max_size)
    if cover is None:
        return None
    return [frozenset(amb.mask_cells(m)) for m in cover]


def rotations(grid: Grid, ambient):
    """Cell shifts along periodic axes that preserve ``ambient``."""
    ambient = frozenset(ambient)
    out = []
    for a, per in enumerate(grid.periodic):
        if not per:
            continue
        for s in (1, -1):
            off = [0] * grid.dim
            off[a] = s
            m = {c: frozenset([grid.shift(c, off)]) for c in ambient}
            if all(img <= ambient for img in m.values()):
                out.append((f"shift axis {a} by {s}", m))
    return out


def flow_steps(fmap, ambient, steps=(1, 2)):
    """Iterates of an enclosure map restricted to ``ambient`` (must be total)."""
    ambient = frozenset(ambient)
    base = {}
    for c in ambient:
        img = fmap.images[c]
        if EXTERIOR in img or not img <= ambient:
            raise ValueError("flow map leaves the ambient complex")
        base[c] = img
    out = []
    for t in steps:
        m = {}
        for c in ambient:
            cur = {c}
            for _ in range(t):
                cur = set().union(*(base[d] for d in cur))
            m[c] = frozenset(cur)
        out.append((f"flow step t={t}", m))
    return out


@dataclass
class AxiomsReport:
    checked: dict = field(default_factory=dict)
    violations: list = field(default_factory=list)
    neighborhood_found: int = 0
    neighborhood_sampled: int = 0

    @property
    def ok(self) -> bool:
        return not self.violations and self.neighborhood_found == self.neighborhood_sampled

    def to_json(self) -> dict:
        return {
            "checked": self.checked,
            "violations": self.violations,
            "axiom_iii_found": self.neighborhood_found,
            "axiom_iii_sampled": self.neighborhood_sampled,
            "ok": self.ok,
        }


def axioms_check(grid: Grid, ambient, n_pairs: int = 100, seed: int = 0, maps=(), max_size: int = 4, oracle=brute_force_hls) -> AxiomsReport:
    """Sample subcomplex pairs and test the category axioms against ``oracle``.

    ``maps`` are cellular self-maps of the ambient (dicts cell -> image set)
    that are homotopic to the identity; periodic shifts are always added.
    """
    ambient = sorted(set(ambient))
    rng = random.Random(seed)
    maps = list(maps) + rotations(grid, ambient)
    rep = AxiomsReport(checked={"i": 0, "ii": 0, "iii": 0, "iv": 0, "v": 0})

    def nu(cells):
        cells = list(cells)
        if not cells:
            return 0
        return oracle(grid, cells, ambient, max_size)

    def sample():
        k = rng.randint(1, len(ambient))
        return frozenset(rng.sample(ambient, k))

    for _ in range(n_pairs):
        B = sample()
        A = frozenset(rng.sample(sorted(B), rng.randint(1, len(B))))
        C = sample()
        a, b, c, ac = nu(A), nu(B), nu(C), nu(A | C)
        rep.checked["i"] += 1
        if a is not None and b is not None and a > b:
            rep.violations.append({"axiom": "i", "A": sorted(A), "B": sorted(B), "nu_A": a, "nu_B": b})
        rep.checked["ii"] += 1
        if None not in (a, c, ac) and ac > a + c:
            rep.violations.append({"axiom": "ii", "A": sorted(A), "B": sorted(C), "nu_union": ac, "sum": a + c})
        rep.checked["iii"] += 1
        rep.neighborhood_sampled += 1
        star = grid.ring(A) & frozenset(ambient)
        if nu(star) == a:
            rep.neighborhood_found += 1
        else:
            cover = optimal_cover(grid, A, ambient, max_size)
            if cover is not None and nu(frozenset().union(*cover)) == a:
                rep.neighborhood_found += 1
            else:
                rep.violations.append({"axiom": "iii", "A": sorted(A), "nu_A": a})
        for name, m in maps:
            fa = frozenset().union(*(m[x] for x in A))
            rep.checked["iv"] += 1
            nfa = nu(fa)
            if a is not None and nfa is not None and a > nfa:
                rep.violations.append({"axiom": "iv", "map": name, "A": sorted(A), "nu_A": a, "nu_fA": nfa})
    verts = sorted({q for c in ambient for q in hull(grid, [c]) if cube_dim(q) == 0})
    for v in verts:
        rep.checked["v"] += 1
        val = oracle(grid, [v], ambient, max_size)
        if val != 1:
            rep.violations.append({"axiom": "v", "point": list(v), "nu": val})
    return rep
