"""Morse decompositions, the attractor filtration and confinement times.

Morse sets are indexed from 0 here; ``sets[0]`` is the attractor-most set
(M_1 in the usual notation), and every prefix ``sets[:j+1]`` is forward
closed inside the invariant part.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

import networkx as nx

from .isolation import invariant_part
from .quotient import BASEPOINT, PointedMap, forward_invariant_part


@dataclass(frozen=True)
class NoConfinement:
    """The eventual cycle of set iteration leaves U; ``witness`` is a stray cell."""

    witness: int


@dataclass(frozen=True)
class MorseDecomposition:
    sets: tuple[frozenset[int], ...]
    dag: frozenset[tuple[int, int]]  # (i, j): a path runs from sets[i] to sets[j]
    pm: PointedMap = field(repr=False)

    def __len__(self):
        return len(self.sets)

    @property
    def invariant(self) -> frozenset[int]:
        return invariant_part(self.pm.pair.fmap, self.pm.cells)

    def hasse_edges(self) -> list[tuple[int, int]]:
        """Covering relations of the reachability order."""
        edges = []
        for i, j in sorted(self.dag):
            if not any((i, k) in self.dag and (k, j) in self.dag for k in range(len(self.sets))):
                edges.append((i, j))
        return edges


@dataclass(frozen=True)
class Filtration:
    stages: tuple[frozenset[int], ...]

    def __len__(self):
        return len(self.stages)

    def below(self, j: int) -> frozenset[int]:
        """Stage j-1, with the empty set below stage 0."""
        return self.stages[j - 1] if j > 0 else frozenset()

    def stage_of(self, c: int) -> int | None:
        for j, st in enumerate(self.stages):
            if c in st:
                return j
        return None


def _graph(pm: PointedMap, cells) -> nx.DiGraph:
    g = nx.DiGraph()
    g.add_nodes_from(cells)
    for c in cells:
        for d in pm.images[c]:
            if d in cells:
                g.add_edge(c, d)
    return g


def morse_sets(pm: PointedMap) -> list[frozenset[int]]:
    """Recurrent classes of F# on Inv(N minus L), sorted by smallest cell."""
    inv = invariant_part(pm.pair.fmap, pm.cells)
    g = _graph(pm, inv)
    out = []
    for comp in nx.strongly_connected_components(g):
        if len(comp) > 1 or g.has_edge(next(iter(comp)), next(iter(comp))):
            out.append(frozenset(comp))
    return sorted(out, key=min)


def _reach_from(g: nx.DiGraph, sources) -> set:
    seen = set()
    stack = [c for c in sources if c in g]
    while stack:
        c = stack.pop()
        for d in g.successors(c):
            if d not in seen:
                seen.add(d)
                stack.append(d)
    return seen


def _reachability(pm: PointedMap, sets) -> set[tuple[int, int]]:
    g = _graph(pm, invariant_part(pm.pair.fmap, pm.cells))
    owner = {c: i for i, s in enumerate(sets) for c in s}
    reach = set()
    for i, s in enumerate(sets):
        for j in {owner[c] for c in _reach_from(g, s) if c in owner}:
            if j != i:
                reach.add((i, j))
    return reach


def admissible_order(sets, pm: PointedMap) -> MorseDecomposition:
    """Order so that every connection runs from a higher to a lower index.

    Among sets with no remaining downstream set, the one containing the
    smallest cell goes first.
    """
    sets = [frozenset(s) for s in sets]
    reach = _reachability(pm, sets)
    remaining = set(range(len(sets)))
    order = []
    while remaining:
        sinks = [i for i in remaining if not any((i, j) in reach for j in remaining if j != i)]
        if not sinks:
            raise AssertionError("condensation has a cycle")
        pick = min(sinks, key=lambda i: min(sets[i]))
        order.append(pick)
        remaining.discard(pick)
    pos = {old: new for new, old in enumerate(order)}
    dag = frozenset((pos[i], pos[j]) for i, j in reach)
    assert all(i > j for i, j in dag)
    return MorseDecomposition(tuple(sets[i] for i in order), dag, pm)


def morse_decomposition(pm: PointedMap) -> MorseDecomposition:
    return admissible_order(morse_sets(pm), pm)


def attractor_filtration(md: MorseDecomposition) -> Filtration:
    """Stage j: cells of I+ with no path inside I+ to a set above j."""
    iplus = forward_invariant_part(md.pm)
    g = _graph(md.pm, iplus)
    rev = g.reverse(copy=False)
    n = len(md.sets)
    stages = []
    for j in range(n):
        upper = frozenset().union(*md.sets[j + 1:]) & iplus
        bad = set(upper) | _reach_from(rev, upper)
        stages.append(frozenset(iplus - bad))
    if not n:
        return Filtration(())
    return Filtration(tuple(stages))


def confinement_time(md: MorseDecomposition, flt: Filtration, A: Iterable[int], j: int, U: Iterable[int]):
    """Least T such that, for every t >= T, the part of F#^t(A) lying in
    I+ minus stage j-1 is inside U.

    Set iteration on a finite ground set is eventually periodic, so the
    answer is exact: the sequence is run until a state repeats.
    """
    if not 0 <= j < len(md.sets):
        raise IndexError(f"Morse index {j} out of range for {len(md.sets)} sets")
    A = frozenset(A)
    U = frozenset(U)
    if not md.sets[j] <= U:
        raise ValueError("U must contain the Morse set")
    lower = flt.below(j)
    window = flt.stages[-1] - lower
    stray = sorted(A - (flt.stages[j] - lower))
    if stray:
        raise ValueError(f"cell {stray[0]} is not in stage {j} minus stage {j - 1}")
    seen = {}
    states = []
    cur = A
    while cur not in seen:
        seen[cur] = len(states)
        states.append(cur)
        cur = md.pm.image_of(cur)
    start = seen[cur]
    for s in states[start:]:
        bad = (s & window) - U - {BASEPOINT}
        if bad:
            return NoConfinement(min(bad))
    T = 0
    for t in range(start):
        if (states[t] & window) - U:
            T = t + 1
    return T
