"""Glue from a system description to the analysis objects."""
from __future__ import annotations

from dataclasses import dataclass, field

from .category import BoundsReport, verify_corollary_3_2, verify_rest_points, verify_theorem_3_1
from .cup import cup_length
from .enclosure import enclose_flow_map
from .expr import parse_field
from .fixtures import fixture
from .grid import CombinatorialMap, build_grid, load_map_json
from .homology import CubicalPair, build_pair, relative_betti
from .isolation import IndexPair, build_index_pair
from .morse import Filtration, MorseDecomposition, attractor_filtration, morse_decomposition
from .quotient import PointedMap, forward_invariant_part, induced_map


def build_map(system: dict) -> CombinatorialMap:
    """``system`` holds one of ``fixture``, ``map`` (inline document),
    ``map_file``, or ``field`` with ``grid``/``tau``/``padding``."""
    if "fixture" in system:
        merged = fixture(system["fixture"])
        merged.update({k: v for k, v in system.items() if k != "fixture"})
        return build_map(merged)
    if "map" in system:
        return load_map_json(system["map"])
    if "map_file" in system:
        return load_map_json(system["map_file"])
    g = system["grid"]
    grid = build_grid(g["box"], g["subdivisions"], g.get("periodic"))
    vf = parse_field(system["field"], grid.dim)
    return enclose_flow_map(vf, grid, float(system["tau"]), float(system.get("padding", 0.0)))


def isolating_set(fmap: CombinatorialMap, selection=None) -> frozenset[int]:
    """``None`` for all cells, a list of multi-indices, or ``{"ranges": [[lo, hi], ...]}``
    with inclusive cell-index ranges per axis."""
    grid = fmap.grid
    if selection is None:
        return frozenset(range(grid.size))
    if isinstance(selection, dict):
        ranges = selection["ranges"]
        out = set()
        for c in range(grid.size):
            if all(lo <= k <= hi for k, (lo, hi) in zip(grid.cell(c), ranges)):
                out.add(c)
        return frozenset(out)
    return frozenset(grid.index(tuple(m)) for m in selection)


@dataclass
class Analysis:
    fmap: CombinatorialMap
    pair: IndexPair
    pm: PointedMap
    md: MorseDecomposition | None = None
    flt: Filtration | None = None
    cpair: CubicalPair | None = None
    betti: tuple[int, ...] | None = None
    cup: int | None = None
    extra: dict = field(default_factory=dict)

    @property
    def iplus(self):
        if "iplus" not in self.extra:
            self.extra["iplus"] = forward_invariant_part(self.pm)
        return self.extra["iplus"]

    def morse(self):
        if self.md is None:
            self.md = morse_decomposition(self.pm)
            self.flt = attractor_filtration(self.md)
        return self.md, self.flt

    def homology(self):
        if self.cpair is None:
            self.cpair = build_pair(self.fmap.grid, self.pair.N, self.pair.L)
            self.betti = relative_betti(self.cpair)
            self.cup = cup_length(self.cpair)
        return self.betti, self.cup

    def theorem_3_1(self) -> BoundsReport:
        self.morse()
        self.homology()
        return verify_theorem_3_1(self.pm, self.md, self.flt, self.cpair)

    def corollary_3_2(self) -> BoundsReport:
        self.morse()
        return verify_corollary_3_2(self.md)

    def rest_points(self, max_diameter=4) -> BoundsReport:
        self.morse()
        self.homology()
        return verify_rest_points(self.pm, self.md, self.cup + 1, max_diameter)


def analyze(fmap: CombinatorialMap, S=None) -> Analysis:
    pair = build_index_pair(fmap, isolating_set(fmap, S) if not isinstance(S, frozenset) else S)
    return Analysis(fmap, pair, induced_map(pair))


def analyze_fixture(name: str, S=None, **overrides) -> Analysis:
    system = {"fixture": name, **overrides}
    return analyze(build_map(system), S)
