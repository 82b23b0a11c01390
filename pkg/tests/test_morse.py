import networkx as nx
import pytest

from conleyls.category import neighborhood_ladder
from conleyls.enclosure import enclose_flow_map
from conleyls.expr import parse_field
from conleyls.grid import build_grid
from conleyls.isolation import build_index_pair
from conleyls.morse import (
    attractor_filtration,
    confinement_time,
    morse_decomposition,
)
from conleyls.pipeline import analyze_fixture
from conleyls.quotient import induced_map

FIXTURES = ["saddle", "attractor", "circle", "torus", "line4"]


@pytest.fixture(scope="module")
def runs():
    out = {}
    for name in FIXTURES:
        a = analyze_fixture(name)
        a.morse()
        out[name] = a
    return out


def test_circle_sets_and_order(runs):
    md = runs["circle"].md
    assert [sorted(M) for M in md.sets] == [[0, 15], [7, 8]]
    assert md.hasse_edges() == [(1, 0)]


def test_torus_sets_and_order(runs):
    a = runs["torus"]
    g = a.fmap.grid
    sets = [sorted(g.cell(c) for c in M) for M in a.md.sets]
    assert len(sets) == 4
    assert (7, 7) in sets[0] and (0, 0) in sets[3]
    assert {min(s) for s in sets[1:3]} == {(0, 7), (7, 0)}
    assert sorted(a.md.hasse_edges()) == [(1, 0), (2, 0), (3, 1), (3, 2)]


def test_zero_field_every_cell_is_morse():
    g = build_grid([[0, 1]], [5], [True])
    f = enclose_flow_map(parse_field(["0"], 1), g, 1.0, 0.0)
    md = morse_decomposition(induced_map(build_index_pair(f, range(5))))
    assert sorted(min(M) for M in md.sets) == list(range(5))
    assert not md.dag


def test_single_set(runs):
    md = runs["attractor"].md
    assert len(md.sets) == 1 and md.hasse_edges() == []
    assert runs["attractor"].flt.stages == (runs["attractor"].iplus,)


@pytest.mark.parametrize("name", FIXTURES)
def test_dag_and_filtration(runs, name):
    a = runs[name]
    md, flt = a.md, a.flt
    g = nx.DiGraph(list(md.dag))
    assert nx.is_directed_acyclic_graph(g)
    assert all(i > j for i, j in md.dag)
    assert all(x <= y for x, y in zip(flt.stages, flt.stages[1:]))
    assert flt.stages[-1] == a.iplus
    for j, M in enumerate(md.sets):
        assert (M & a.iplus) <= flt.stages[j]


def test_circle_first_stage_drops_repeller(runs):
    a = runs["circle"]
    assert a.flt.stages[0] == a.iplus - a.md.sets[1]


def test_torus_first_stage_is_basin_of_minimum(runs):
    a = runs["torus"]
    md, flt = a.md, a.flt
    above = frozenset().union(*md.sets[1:])
    assert not flt.stages[0] & above
    assert md.sets[0] <= flt.stages[0]


def test_circle_confinement_from_basin_edge(runs):
    a = runs["circle"]
    md, flt = a.md, a.flt
    U = a.fmap.grid.ring(md.sets[0])
    A = {6}  # next to the repeller cluster {7, 8}
    T = confinement_time(md, flt, A, 0, U)
    assert isinstance(T, int) and T <= 16


def test_confinement_of_morse_set_itself(runs):
    a = runs["circle"]
    assert confinement_time(a.md, a.flt, a.md.sets[0], 0, a.md.sets[0] | {1, 14}) == 0


def test_torus_confinement_near_saddle(runs):
    a = runs["torus"]
    g = a.fmap.grid
    md, flt = a.md, a.flt
    A = {g.index((6, 2))}
    assert A <= flt.stages[0]
    T = confinement_time(md, flt, A, 0, g.ring(md.sets[0]))
    assert isinstance(T, int)


def test_confinement_delay_counts_transient_steps(runs):
    # with U = M_1 exactly, every step spent outside the attractor counts
    a = runs["circle"]
    md, flt = a.md, a.flt
    far = confinement_time(md, flt, {5}, 0, md.sets[0])
    near = confinement_time(md, flt, {1}, 0, md.sets[0])
    assert isinstance(far, int) and isinstance(near, int)
    assert far >= near >= 1


def test_confinement_preconditions(runs):
    a = runs["circle"]
    md, flt = a.md, a.flt
    with pytest.raises(ValueError):
        confinement_time(md, flt, {7}, 0, md.sets[0])
    with pytest.raises(ValueError):
        confinement_time(md, flt, {1}, 0, {1})
    with pytest.raises(IndexError):
        confinement_time(md, flt, set(), 5, md.sets[0])


def test_ladder_examples(runs):
    circle = runs["circle"].md
    lad = neighborhood_ladder(circle, 0)
    assert lad.weight == 1 and circle.sets[0] <= lad.cells
    torus = runs["torus"].md
    assert [neighborhood_ladder(torus, j).weight for j in range(4)] == [1, 1, 1, 1]
    line = runs["line4"].md
    lad = neighborhood_ladder(line, 0)
    assert lad.rings == 0 and lad.cells == line.sets[0]


def test_filtration_membership(runs):
    a = runs["circle"]
    assert a.flt.stage_of(0) == 0 and a.flt.stage_of(7) == 1
