import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conleyls.enclosure import enclose_flow_map
from conleyls.expr import parse_field
from conleyls.grid import build_grid, load_map_json
from conleyls.isolation import (
    NotIsolating,
    build_index_pair,
    forward_closure,
    invariant_part,
    validate_index_pair,
)
from conleyls.pipeline import build_map, isolating_set

@pytest.fixture(scope="module")
def line4():
    return build_map({"fixture": "line4"})


@pytest.fixture(scope="module")
def saddle():
    return build_map({"fixture": "saddle"})


def test_line4_invariant_part(line4):
    assert invariant_part(line4, range(4)) == {0, 1}


def test_line4_pairs(line4):
    p = build_index_pair(line4, {0, 1})
    assert p.N == {0, 1} and p.L == set()
    p = build_index_pair(line4, range(4))
    assert validate_index_pair(line4, p.N, p.L).ok
    assert invariant_part(line4, p.interior) == {0, 1}


def test_single_fixed_cell():
    f = load_map_json({"cells": [1], "images": {"0": [[0]]}})
    p = build_index_pair(f, {0})
    assert p.N == {0} and p.L == set()


def test_zero_field_everything_invariant():
    g = build_grid([[0, 1], [0, 1]], [4, 4])
    f = enclose_flow_map(parse_field(["0", "0"], 2), g, 1.0, 0.0)
    S = {1, 2, 5, 6, 9}
    assert invariant_part(f, S) == S


def test_empty_set_rejected(line4):
    with pytest.raises(ValueError):
        build_index_pair(line4, set())


def test_saddle_invariant_part(saddle):
    g = saddle.grid
    A = invariant_part(saddle, range(g.size))
    center = {g.index(m) for m in [(7, 7), (7, 8), (8, 7), (8, 8)]}
    assert center <= A
    assert all(g.cell(c)[0] in (7, 8) or g.cell(c)[1] in (7, 8) for c in A)


def test_saddle_pair_exits_along_x(saddle):
    g = saddle.grid
    p = build_index_pair(saddle, range(g.size))
    A = invariant_part(saddle, range(g.size))
    assert A <= p.interior
    assert validate_index_pair(saddle, p.N, p.L).ok
    worst_a = max(abs(g.cell(c)[0] - 7.5) for c in A)
    assert all(abs(g.cell(c)[0] - 7.5) > worst_a for c in p.L)


def test_mutation_reports_predecessor(saddle):
    g = saddle.grid
    p = build_index_pair(saddle, range(g.size))
    interior = p.interior
    victim = min(c for c in p.L if saddle.preimages[c] & interior)
    N = p.N - {victim}
    rep = validate_index_pair(saddle, N, p.L - {victim})
    assert not rep.exit_through_L
    w = rep.witnesses["exit_through_L"]
    assert w in interior and not saddle.images[w] <= N


def test_empty_pair_vacuous(saddle):
    rep = validate_index_pair(saddle, set(), set())
    assert rep.ok and rep.witnesses == {}


def test_too_small_block_is_not_isolating(saddle):
    S = isolating_set(saddle, {"ranges": [[5, 10], [5, 10]]})
    with pytest.raises(NotIsolating) as err:
        build_index_pair(saddle, S)
    assert err.value.witness is not None


def test_report_json_names_witness_cells(saddle):
    g = saddle.grid
    rep = validate_index_pair(saddle, {0}, set())
    doc = rep.to_json(g)
    assert doc["exit_through_L"] is False
    assert doc["witnesses"]["exit_through_L"] == [0, 0]


cells = st.frozensets(st.integers(0, 255), min_size=1, max_size=120)


@settings(max_examples=40, deadline=None)
@given(cells)
def test_invariant_part_idempotent(saddle, S):
    A = invariant_part(saddle, S)
    assert invariant_part(saddle, A) == A
    assert A <= S


@settings(max_examples=40, deadline=None)
@given(cells, cells)
def test_invariant_part_monotone(saddle, S, T):
    assert invariant_part(saddle, S) <= invariant_part(saddle, S | T)


@settings(max_examples=30, deadline=None)
@given(cells)
def test_forward_closure_is_closed(saddle, S):
    seed = set(list(S)[:3])
    C = forward_closure(saddle, seed, S)
    assert seed & S <= C <= S
    assert all((saddle.images[c] & S) <= C for c in C)
