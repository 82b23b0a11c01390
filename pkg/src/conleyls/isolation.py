"""Maximal invariant sets and combinatorial index pairs."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable

from .grid import EXTERIOR, CombinatorialMap


class NotIsolating(Exception):
    """The candidate set does not isolate its invariant part."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


def invariant_part(fmap: CombinatorialMap, S: Iterable[int]) -> frozenset[int]:
    """Largest subset of ``S`` in which every cell has a successor and a
    predecessor."""
    alive = set(S)
    succ = {c: {d for d in fmap.images[c] if d in alive} for c in alive}
    pred = {c: set() for c in alive}
    for c, ds in succ.items():
        for d in ds:
            pred[d].add(c)
    queue = deque(c for c in alive if not succ[c] or not pred[c])
    while queue:
        c = queue.popleft()
        if c not in alive:
            continue
        alive.discard(c)
        for d in succ[c]:
            if d in alive:
                pred[d].discard(c)
                if not pred[d]:
                    queue.append(d)
        for p in pred[c]:
            if p in alive:
                succ[p].discard(c)
                if not succ[p]:
                    queue.append(p)
    return frozenset(alive)


def forward_closure(fmap: CombinatorialMap, seed: Iterable[int], within: Iterable[int]) -> frozenset[int]:
    """Cells of ``within`` reachable from ``seed`` by paths inside ``within``."""
    within = frozenset(within)
    seen = set(c for c in seed if c in within)
    stack = list(seen)
    while stack:
        c = stack.pop()
        for d in fmap.images[c]:
            if d in within and d not in seen:
                seen.add(d)
                stack.append(d)
    return frozenset(seen)


@dataclass(frozen=True)
class IndexPair:
    N: frozenset[int]
    L: frozenset[int]
    fmap: CombinatorialMap = field(repr=False)

    @property
    def interior(self) -> frozenset[int]:
        return self.N - self.L

    @property
    def grid(self):
        return self.fmap.grid


@dataclass
class ValidationReport:
    positive_invariance: bool
    exit_through_L: bool
    isolation: bool
    witnesses: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.positive_invariance and self.exit_through_L and self.isolation

    def to_json(self, grid=None) -> dict:
        show = (lambda c: list(grid.cell(c))) if grid is not None else (lambda c: c)
        return {
            "positive_invariance": self.positive_invariance,
            "exit_through_L": self.exit_through_L,
            "isolation": self.isolation,
            "witnesses": {k: show(v) for k, v in sorted(self.witnesses.items())},
        }


def exit_collar(grid, N, L) -> frozenset[int]:
    """Cells of N minus L sharing at least a vertex with a cell of L."""
    if not L:
        return frozenset()
    return grid.ring(L) & (frozenset(N) - frozenset(L))


def validate_index_pair(fmap: CombinatorialMap, N: Iterable[int], L: Iterable[int]) -> ValidationReport:
    N = frozenset(N)
    L = frozenset(L)
    witnesses = {}
    pos_bad = sorted(c for c in L if c not in N or not (fmap.images[c] & N) <= L)
    if pos_bad:
        witnesses["positive_invariance"] = pos_bad[0]
    interior = N - L
    exit_bad = sorted(c for c in interior if not fmap.images[c] <= N)
    if exit_bad:
        witnesses["exit_through_L"] = exit_bad[0]
    inv = invariant_part(fmap, interior) if interior else frozenset()
    iso_bad = sorted(inv & exit_collar(fmap.grid, N, L))
    if iso_bad:
        witnesses["isolation"] = iso_bad[0]
    return ValidationReport(not pos_bad, not exit_bad, not iso_bad, witnesses)


def build_index_pair(fmap: CombinatorialMap, S: Iterable[int]) -> IndexPair:
    """Index pair whose interior isolates ``Inv(S)``.

    N starts from ``Inv(S)`` and its one-ring of grid neighbors within ``S``
    and grows by forward images inside ``S``; L collects the cells of N with an image
    outside N and is closed forward within N.  When the exit set ends up
    next to the invariant part, the seed grows by another ring.
    """
    S = frozenset(S)
    if not S:
        raise ValueError("isolating candidate S is empty")
    grid = fmap.grid
    A = invariant_part(fmap, S)
    seed = (grid.ring(A) & S) if A else S
    while True:
        N = forward_closure(fmap, seed, S)
        exits = [c for c in N if not fmap.images[c] <= N]
        L = forward_closure(fmap, exits, N)
        hit = sorted(L & A)
        report = validate_index_pair(fmap, N, L)
        if not hit and report.isolation:
            break
        wider = grid.ring(seed) & S
        if wider == seed:
            if hit:
                raise NotIsolating("exit set reaches the invariant part", hit[0])
            raise NotIsolating("invariant part touches the exit set", report.witnesses["isolation"])
        seed = wider
    assert report.ok, report
    return IndexPair(N, L, fmap)


__all__ = [
    "EXTERIOR",
    "IndexPair",
    "NotIsolating",
    "ValidationReport",
    "build_index_pair",
    "forward_closure",
    "invariant_part",
    "validate_index_pair",
]
