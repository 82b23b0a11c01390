import pytest

from conleyls.fixtures import tiny_system
from conleyls.grid import build_grid
from conleyls.oracle import (
    OracleSizeError,
    axioms_check,
    brute_force_hls,
    flow_steps,
    optimal_cover,
    rotations,
)
from conleyls.pipeline import build_map


def test_circle8_needs_two():
    g = build_grid([[0, 1]], [8], [True])
    assert brute_force_hls(g, range(8), range(8)) == 2
    cover = optimal_cover(g, range(8), range(8))
    assert len(cover) == 2 and frozenset().union(*cover) <= set(range(8))


def test_single_square():
    g = build_grid([[0, 1], [0, 1]], [3, 3])
    assert brute_force_hls(g, [4], [4]) == 1


def test_two_disjoint_squares():
    g = build_grid([[0, 1], [0, 1]], [3, 3])
    assert brute_force_hls(g, [0, 2], [0, 2]) == 2


def test_torus_3x4_is_three():
    g = build_grid([[0, 1], [0, 1]], [3, 4], [True, True])
    assert brute_force_hls(g, range(12), range(12)) == 3


def test_max_size_gives_unknown():
    g = build_grid([[0, 1]], [8], [True])
    assert brute_force_hls(g, range(8), range(8), max_size=1) is None


def test_empty_target_is_zero():
    g = build_grid([[0, 1]], [8], [True])
    assert brute_force_hls(g, [], range(8)) == 0


def test_point_targets():
    g = build_grid([[0, 1]], [8], [True])
    assert brute_force_hls(g, [(0,)], range(8)) == 1
    assert brute_force_hls(g, [(0,), (8,)], range(8)) == 1


def test_size_guard():
    g = build_grid([[0, 1], [0, 1]], [4, 4])
    with pytest.raises(OracleSizeError):
        brute_force_hls(g, [0], range(16))


def test_target_outside_ambient():
    g = build_grid([[0, 1], [0, 1]], [4, 4])
    with pytest.raises(ValueError):
        brute_force_hls(g, [15], [0, 1])


def test_rotations_and_flow_steps():
    f = build_map({"fixture": "circle8"})
    assert len(rotations(f.grid, range(8))) == 2
    steps = flow_steps(f, range(8))
    assert [name for name, _ in steps] == ["flow step t=1", "flow step t=2"]
    assert all(m[c] for _, m in steps for c in range(8))


def test_flow_steps_require_total_map():
    f = build_map({"fixture": "saddle"})
    with pytest.raises(ValueError):
        flow_steps(f, [0, 1])


@pytest.mark.parametrize("kind,seed", [("circle", s) for s in range(4)] + [("torus", s) for s in range(2)])
def test_tiny_systems_are_tiny(kind, seed):
    f = build_map(tiny_system(seed, kind))
    assert f.grid.size <= 14


def test_axioms_on_circle8():
    f = build_map({"fixture": "circle8"})
    rep = axioms_check(f.grid, range(8), n_pairs=30, seed=3, maps=flow_steps(f, range(8)))
    assert rep.ok, rep.violations
    assert rep.checked["v"] == 8 and rep.checked["iv"] == 30 * 4


def test_axioms_catch_a_broken_oracle():
    g = build_grid([[0, 1]], [8], [True])

    def broken(grid, cells, ambient, max_size):
        return len(set(cells)) % 3 + 1

    rep = axioms_check(g, range(8), n_pairs=20, seed=0, oracle=broken)
    assert not rep.ok
    assert {v["axiom"] for v in rep.violations} & {"i", "ii", "iv"}
