import pytest

from conleyls.grid import load_map_json
from conleyls.isolation import IndexPair, build_index_pair
from conleyls.pipeline import analyze_fixture, build_map
from conleyls.quotient import (
    BASEPOINT,
    InvalidIndexPair,
    NoCollapse,
    collapse_levels,
    collapse_time,
    forward_invariant_part,
    induced_map,
)


@pytest.fixture(scope="module")
def saddle():
    return analyze_fixture("saddle")


def test_basepoint_exactly_on_exits(saddle):
    pm = saddle.pm
    interior = pm.cells
    for c in interior:
        leaves = not saddle.fmap.images[c] <= interior
        assert (BASEPOINT in pm(c)) == leaves
        assert pm(c) - {BASEPOINT} <= interior
    assert pm(BASEPOINT) == {BASEPOINT}


def test_empty_exit_set_means_restriction():
    a = analyze_fixture("circle")
    assert not a.pair.L
    for c in a.pm.cells:
        assert a.pm(c) == a.fmap.images[c]


def test_single_cell():
    f = load_map_json({"cells": [1], "images": {"0": [[0]]}})
    pm = induced_map(build_index_pair(f, {0}))
    assert pm(0) == {0} and pm(BASEPOINT) == {BASEPOINT}


def test_invalid_pair_rejected():
    f = build_map({"fixture": "line4"})
    with pytest.raises(InvalidIndexPair):
        induced_map(IndexPair(frozenset({1, 2}), frozenset(), f))


def test_saddle_iplus_is_stable_strip(saddle):
    g = saddle.fmap.grid
    assert saddle.iplus
    assert {g.cell(c)[0] for c in saddle.iplus} == {7, 8}


def test_iplus_is_everything_without_exits():
    a = analyze_fixture("torus")
    assert a.iplus == a.pm.cells


def test_line4_iplus():
    f = build_map({"fixture": "line4"})
    pm = induced_map(build_index_pair(f, {0, 1}))
    assert forward_invariant_part(pm) == {0, 1}


def test_collapse_time_empty_is_zero(saddle):
    assert collapse_time(saddle.pm, set()) == 0


def test_collapse_time_rejects_foreign_cells(saddle):
    with pytest.raises(ValueError):
        collapse_time(saddle.pm, saddle.pair.L)


def test_extremal_columns_collapse(saddle):
    g = saddle.fmap.grid
    cols = sorted({g.cell(c)[0] for c in saddle.pm.cells})
    A = {c for c in saddle.pm.cells if g.cell(c)[0] in (cols[0], cols[-1])}
    k = collapse_time(saddle.pm, A)
    assert isinstance(k, int) and 1 <= k <= len(cols)


def test_stable_cell_never_collapses(saddle):
    c = min(saddle.iplus)
    res = collapse_time(saddle.pm, {c})
    assert isinstance(res, NoCollapse) and res.witness == c


def test_collapse_levels_exhaust_complement(saddle):
    levels = collapse_levels(saddle.pm)
    assert all(a <= b for a, b in zip(levels, levels[1:]))
    assert levels[-1] - {BASEPOINT} == saddle.pm.cells - saddle.iplus
    for k, lev in enumerate(levels[1:], 1):
        fresh = lev - levels[k - 1]
        assert all(collapse_time(saddle.pm, {c}) == k for c in fresh)
