"""Categorical covers built from a Morse decomposition and the resulting
Lusternik-Schnirelmann bounds.

Cover elements live in N minus L.  Each carries one certificate:

``flow``
    F#^t maps the element into a target whose hull collapses.
``carrier``
    the element's own hull collapses.
``residual``
    the element reaches the basepoint in finitely many steps.

Flow certificates presume cell images are connected and acyclic, which is
how enclosures of a flow behave at adequate resolution.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .collapse import Collapse, collapsible
from .cup import cup_length
from .grid import EXTERIOR, CombinatorialMap
from .homology import CubicalPair, build_pair
from .isolation import IndexPair
from .morse import Filtration, MorseDecomposition, attractor_filtration, morse_decomposition
from .quotient import BASEPOINT, NoCollapse, PointedMap, collapse_time, induced_map

PASS, FAIL, NA = "pass", "fail", "not-applicable"

FLOW_HYPOTHESIS = "cell images of the map are connected and acyclic"


class CoverError(RuntimeError):
    def __init__(self, message, index=None, cells=frozenset()):
        super().__init__(message)
        self.index = index
        self.cells = frozenset(cells)


class GradientLikeViolation(RuntimeError):
    pass


@dataclass(frozen=True)
class Ladder:
    cells: frozenset[int]
    rings: int | None  # None when the multi-piece fallback was used
    pieces: tuple[frozenset[int], ...]
    collapses: tuple[Collapse, ...] = field(repr=False)

    @property
    def weight(self) -> int:
        return len(self.pieces)


@dataclass(frozen=True)
class CoverElement:
    cells: frozenset[int]
    kind: str
    flow_time: int = 0
    target: frozenset[int] = frozenset()
    weight: int = 1
    index: int | None = None

    def to_json(self, grid) -> dict:
        return {
            "morse_index": None if self.index is None else self.index + 1,
            "certificate": self.kind,
            "flow_time": self.flow_time,
            "weight": self.weight,
            "cells": grid.to_multi(self.cells),
            "target": grid.to_multi(self.target),
        }


@dataclass(frozen=True)
class CategoricalCover:
    elements: tuple[CoverElement, ...]
    residual: CoverElement
    pm: PointedMap = field(repr=False)
    ladders: tuple[Ladder, ...] = field(repr=False, default=())

    @property
    def pointed(self) -> bool:
        return bool(self.pm.pair.L)

    def union(self) -> frozenset[int]:
        return frozenset().union(*(e.cells for e in self.elements), self.residual.cells)


def _grow_piece(grid, seed, pool):
    piece = {seed}
    frontier = True
    while frontier:
        frontier = False
        for c in sorted(grid.ring(piece) & pool - piece):
            if collapsible(grid, piece | {c}):
                piece.add(c)
                frontier = True
    return frozenset(piece)


def neighborhood_ladder(md: MorseDecomposition, j: int, max_rings: int = 3) -> Ladder:
    """Smallest collapsible ring neighborhood of Morse set ``j`` inside N minus L.

    Falls back to a greedy cover of the Morse set by collapsible pieces.
    """
    grid = md.pm.grid
    interior = md.pm.cells
    M = md.sets[j]
    for k in range(max_rings + 1):
        U = grid.ring(M, k) if k else M
        if not U <= interior:
            break
        cert = collapsible(grid, U)
        if cert is not None:
            return Ladder(frozenset(U), k, (frozenset(U),), (cert,))
    pieces = []
    left = set(M)
    while left:
        piece = _grow_piece(grid, min(left), frozenset(M))
        pieces.append(piece)
        left -= piece
    return Ladder(
        frozenset(M), None, tuple(pieces), tuple(collapsible(grid, p) for p in pieces)
    )


def _flow_preimages(pm: PointedMap, target, limit):
    """Yield ``(t, E_t)`` with E_t the cells whose t-step image lies in target."""
    E = frozenset(target)
    seen = set()
    for t in range(limit + 1):
        yield t, E
        seen.add(E)
        E = frozenset(c for c in pm.cells if pm.images[c] <= E)
        if E in seen:
            return


def cover_from_morse(md: MorseDecomposition, flt: Filtration, max_rings: int = 3) -> CategoricalCover:
    pm = md.pm
    grid = pm.grid
    interior = pm.cells
    elements = []
    ladders = []
    covered = frozenset()
    for j in range(len(md.sets)):
        lad = neighborhood_ladder(md, j, max_rings)
        ladders.append(lad)
        todo = flt.stages[j] - covered
        elem = None
        for t, E in _flow_preimages(pm, lad.cells, len(interior) + 1):
            if todo <= E:
                elem = CoverElement(E, "flow", t, lad.cells, lad.weight, j)
                break
        if elem is None:
            for cand in (todo | lad.cells, todo):
                if collapsible(grid, cand) is not None:
                    elem = CoverElement(frozenset(cand), "carrier", 0, frozenset(cand), 1, j)
                    break
        if elem is None:
            raise CoverError(f"no certified set covers stage {j + 1}", j, todo)
        elements.append(elem)
        covered = covered | elem.cells
        assert flt.stages[j] <= covered
    rest = interior - covered
    k = collapse_time(pm, rest)
    if isinstance(k, NoCollapse):
        raise CoverError("residual set does not collapse to the basepoint", None, rest)
    residual = CoverElement(rest, "residual", k)
    return CategoricalCover(tuple(elements), residual, pm, tuple(ladders))


def check_cover(cover: CategoricalCover, flt: Filtration) -> list[str]:
    """Re-verify every certificate by direct iteration; returns problems found."""
    pm = cover.pm
    grid = pm.grid
    problems = []
    interior = pm.cells
    if cover.union() != interior:
        problems.append("cover does not exhaust N minus L")
    running = frozenset()
    for j, e in enumerate(cover.elements):
        if not e.cells <= interior:
            problems.append(f"element {j + 1} leaves N minus L")
        running |= e.cells
        if j < len(flt.stages) and not flt.stages[j] <= running:
            problems.append(f"stage {j + 1} not covered by the first {j + 1} elements")
        if e.kind == "flow":
            img = e.cells
            for _ in range(e.flow_time):
                img = pm.image_of(img)
            if not img <= e.target:
                problems.append(f"element {j + 1}: flow image escapes its target")
            if BASEPOINT in img:
                problems.append(f"element {j + 1}: flow reaches the basepoint")
            if collapsible(grid, e.target) is None and e.weight == 1:
                problems.append(f"element {j + 1}: target does not collapse")
        elif e.kind == "carrier" and e.cells and collapsible(grid, e.cells) is None:
            problems.append(f"element {j + 1}: carrier does not collapse")
    if isinstance(collapse_time(pm, cover.residual.cells), NoCollapse):
        problems.append("residual does not collapse")
    return problems


def hls_upper(cover: CategoricalCover) -> int:
    """Certified cover size; the basepoint neighborhood absorbs the residual."""
    n = sum(e.weight for e in cover.elements if e.cells)
    if cover.pointed:
        return n + 1
    return n + (1 if cover.residual.cells else 0)


def hls_lower(pair: CubicalPair) -> int:
    return cup_length(pair) + 1


def _verdict(ok) -> str:
    if ok is None:
        return NA
    return PASS if ok else FAIL


@dataclass
class BoundsReport:
    lower: int | None = None
    upper: int | None = None
    per_morse_upper: list[int] = field(default_factory=list)
    basepoint_term: int = 0
    verdicts: dict = field(default_factory=dict)
    details: dict = field(default_factory=dict)
    cover: CategoricalCover | None = field(default=None, repr=False)

    def to_json(self, grid=None) -> dict:
        doc = {
            "lower": self.lower,
            "upper": self.upper,
            "per_morse_upper": list(self.per_morse_upper),
            "basepoint_term": self.basepoint_term,
            **self.verdicts,
            "details": self.details,
        }
        if self.cover is not None and grid is not None:
            doc["certificates"] = [e.to_json(grid) for e in self.cover.elements] + [
                self.cover.residual.to_json(grid)
            ]
            doc["hypotheses"] = [FLOW_HYPOTHESIS] if any(
                e.kind == "flow" and e.flow_time > 0 for e in self.cover.elements
            ) else []
        return doc


def _pair_of(pm: PointedMap) -> CubicalPair:
    return build_pair(pm.grid, pm.pair.N, pm.pair.L)


def verify_theorem_3_1(pm: PointedMap, md: MorseDecomposition, flt: Filtration, cpair=None) -> BoundsReport:
    cover = cover_from_morse(md, flt)
    if cpair is None:
        cpair = _pair_of(pm)
    lower = hls_lower(cpair)
    upper = hls_upper(cover)
    per = [lad.weight for lad in cover.ladders]
    base = 1 if cover.pointed else 0
    bound = base + sum(per)
    a = upper <= bound
    b = lower <= upper
    rep = BoundsReport(lower, upper, per, base, cover=cover)
    rep.verdicts["theorem_3_1"] = _verdict(a and b)
    rep.verdicts["theorem_4_4"] = _verdict(a if cover.pointed else None)
    rep.details.update(
        {
            "cover_bound": bound,
            "cover_within_bound": a,
            "lower_within_upper": b,
            "pointed": cover.pointed,
            "cover_problems": check_cover(cover, flt),
        }
    )
    return rep


def restrict_to_invariant(md: MorseDecomposition) -> PointedMap:
    """Pointed map of F restricted to I = Inv(N minus L), with index pair (I, empty)."""
    fmap = md.pm.pair.fmap
    inv = md.invariant
    images = tuple(
        (fmap.images[c] & inv) if c in inv else frozenset([EXTERIOR]) for c in range(fmap.grid.size)
    )
    sub = CombinatorialMap(fmap.grid, images, fmap.step)
    return induced_map(IndexPair(inv, frozenset(), sub))


def verify_corollary_3_2(md: MorseDecomposition) -> BoundsReport:
    """Cover of the compact invariant set itself by the flow construction."""
    if not md.invariant:
        return BoundsReport(verdicts={"corollary_3_2": NA})
    pm = restrict_to_invariant(md)
    md2 = morse_decomposition(pm)
    flt2 = attractor_filtration(md2)
    cover = cover_from_morse(md2, flt2)
    per = [lad.weight for lad in cover.ladders]
    upper = hls_upper(cover)
    rep = BoundsReport(None, upper, per, 0, cover=cover)
    rep.verdicts["corollary_3_2"] = _verdict(upper <= sum(per))
    rep.details["invariant_cells"] = len(md.invariant)
    return rep


def _cyclic_gap(a, b, n, periodic):
    d = abs(a - b)
    return min(d, n - d) if periodic else d


def cluster_diameter(grid, cells) -> int:
    multi = [grid.cell(c) for c in cells]
    best = 0
    for p, q in itertools.combinations(multi, 2):
        gap = max(
            _cyclic_gap(x, y, n, per) for x, y, n, per in zip(p, q, grid.subdivisions, grid.periodic)
        )
        best = max(best, gap)
    return best


def verify_rest_points(pm: PointedMap, md: MorseDecomposition, lower: int | None = None, max_diameter: int = 4) -> BoundsReport:
    """Rest-cluster count against cup-length bound minus the basepoint term."""
    grid = pm.grid
    clusters = []
    for j, M in enumerate(md.sets):
        if not any(c in pm.images[c] for c in M):
            raise GradientLikeViolation(f"Morse set {j + 1} has no self-looped cell")
        clusters.append(cluster_diameter(grid, M) <= max_diameter)
    count = sum(clusters)
    if lower is None:
        lower = hls_lower(_pair_of(pm))
    ok = count >= lower - 1
    rep = BoundsReport(lower, None, [], 1)
    rep.verdicts["theorem_3_3"] = _verdict(ok)
    rep.verdicts["theorem_4_6"] = _verdict(ok)
    rep.details.update(
        {
            "rest_points": count,
            "required": lower - 1,
            "caveat": "each rest cluster certifies at least one equilibrium of the generating field",
        }
    )
    return rep
