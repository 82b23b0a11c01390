"""Pointed quotient dynamics on N/L."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from .isolation import IndexPair, validate_index_pair

#: The collapsed exit set [L].
BASEPOINT = -2


class InvalidIndexPair(ValueError):
    def __init__(self, report):
        super().__init__(f"not an index pair: {report.witnesses}")
        self.report = report


@dataclass(frozen=True)
class NoCollapse:
    """Collapse is impossible: ``witness`` has an infinite forward path in N minus L."""

    witness: int


@dataclass(frozen=True)
class PointedMap:
    pair: IndexPair
    images: dict = field(repr=False)

    @property
    def grid(self):
        return self.pair.grid

    @property
    def cells(self) -> frozenset[int]:
        return self.pair.interior

    def __call__(self, c: int) -> frozenset[int]:
        return self.images[c]

    def image_of(self, cells: Iterable[int]) -> frozenset[int]:
        out = set()
        for c in cells:
            out |= self.images[c]
        return frozenset(out)

    def successors(self, c: int) -> frozenset[int]:
        """Successors other than the basepoint."""
        return self.images[c] - {BASEPOINT}


def induced_map(pair: IndexPair) -> PointedMap:
    report = validate_index_pair(pair.fmap, pair.N, pair.L)
    if not (report.positive_invariance and report.exit_through_L):
        raise InvalidIndexPair(report)
    interior = pair.interior
    images = {BASEPOINT: frozenset([BASEPOINT])}
    for c in interior:
        img = pair.fmap.images[c]
        inside = img & interior
        images[c] = inside | {BASEPOINT} if not img <= interior else inside
    return PointedMap(pair, images)


def forward_invariant_part(pm: PointedMap) -> frozenset[int]:
    """Cells of N minus L with an infinite forward path avoiding [L]."""
    alive = set(pm.cells)
    succ = {c: set(pm.successors(c)) for c in alive}
    pred = {c: set() for c in alive}
    for c, ds in succ.items():
        for d in ds:
            pred[d].add(c)
    stack = [c for c in alive if not succ[c]]
    while stack:
        c = stack.pop()
        if c not in alive:
            continue
        alive.discard(c)
        for p in pred[c]:
            if p in alive:
                succ[p].discard(c)
                if not succ[p]:
                    stack.append(p)
    return frozenset(alive)


def collapse_time(pm: PointedMap, A: Iterable[int], iplus=None):
    """Least k with F#^k(A) = {[L]}, or :class:`NoCollapse`."""
    A = frozenset(A)
    if not A:
        return 0
    stray = A - pm.cells
    if stray:
        raise ValueError(f"cells {sorted(stray)[:5]} are not in N minus L")
    if iplus is None:
        iplus = forward_invariant_part(pm)
    hit = A & iplus
    if hit:
        return NoCollapse(min(hit))
    cur = A
    k = 0
    # every path off I+ reaches [L] within |N minus L| steps
    while cur != {BASEPOINT}:
        cur = pm.image_of(cur)
        k += 1
        assert k <= len(pm.cells) + 1
    return k


def collapse_levels(pm: PointedMap) -> list[frozenset[int]]:
    """Nondecreasing chain of cells whose k-th image is exactly {[L]}.

    Entry k holds the k-fold strong preimage of the basepoint (including
    the basepoint itself); the chain stops once it stabilizes.
    """
    levels = [frozenset([BASEPOINT])]
    while True:
        prev = levels[-1]
        nxt = frozenset([BASEPOINT]) | frozenset(c for c in pm.cells if pm.images[c] <= prev)
        if nxt == prev:
            return levels
        levels.append(nxt)
