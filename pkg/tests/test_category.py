import dataclasses

import pytest

from conleyls.category import (
    FAIL,
    NA,
    PASS,
    GradientLikeViolation,
    check_cover,
    cluster_diameter,
    cover_from_morse,
    hls_lower,
    hls_upper,
    verify_corollary_3_2,
    verify_rest_points,
    verify_theorem_3_1,
)
from conleyls.grid import build_grid, load_map_json
from conleyls.homology import build_pair
from conleyls.isolation import build_index_pair
from conleyls.morse import attractor_filtration, morse_decomposition
from conleyls.pipeline import analyze_fixture
from conleyls.quotient import induced_map


@pytest.fixture(scope="module")
def runs():
    out = {}
    for name in ["saddle", "attractor", "circle", "torus", "line4"]:
        a = analyze_fixture(name)
        a.morse()
        out[name] = a
    return out


def _cover(a):
    return cover_from_morse(a.md, a.flt)


def test_circle_cover(runs):
    cov = _cover(runs["circle"])
    assert len(cov.elements) == 2 and not cov.residual.cells
    assert hls_upper(cov) == 2
    assert not check_cover(cov, runs["circle"].flt)


def test_torus_cover(runs):
    cov = _cover(runs["torus"])
    assert hls_upper(cov) <= 4
    assert [e.weight for e in cov.elements] == [1, 1, 1, 1]
    assert not check_cover(cov, runs["torus"].flt)


def test_attractor_single_element(runs):
    a = runs["attractor"]
    cov = _cover(a)
    assert hls_upper(cov) == 1
    assert cov.elements[0].cells == a.pm.cells


def test_saddle_cover_counts_basepoint(runs):
    cov = _cover(runs["saddle"])
    assert cov.pointed and hls_upper(cov) == 2
    assert not check_cover(cov, runs["saddle"].flt)


def test_draining_system_has_upper_one():
    f = load_map_json({"cells": [4], "images": {"0": [[1]], "1": [[2]], "2": [[3]], "3": ["exterior"]}})
    pm = induced_map(build_index_pair(f, range(4)))
    md = morse_decomposition(pm)
    assert md.sets == ()
    cov = cover_from_morse(md, attractor_filtration(md))
    assert cov.residual.cells == pm.cells and hls_upper(cov) == 1


def test_hls_lower_examples(runs):
    for name, expected in (("circle", 2), ("torus", 3)):
        runs[name].homology()
        assert hls_lower(runs[name].cpair) == expected
    g = build_grid([[0, 1], [0, 1]], [4, 4])
    assert hls_lower(build_pair(g, [0, 1, 5])) == 1


def test_tampered_cover_is_caught(runs):
    a = runs["circle"]
    cov = _cover(a)
    first = cov.elements[0]
    shrunk = dataclasses.replace(first, cells=frozenset(sorted(first.cells)[:3]))
    bad = dataclasses.replace(cov, elements=(shrunk,) + cov.elements[1:])
    problems = check_cover(bad, a.flt)
    assert any("exhaust" in p for p in problems)
    assert any("stage 1" in p for p in problems)


@pytest.mark.parametrize(
    "name,lower,upper,bound",
    [("circle", 2, 2, 2), ("torus", 3, 4, 4), ("saddle", 2, 2, 2), ("attractor", 1, 1, 1)],
)
def test_cover_bound_verdicts(runs, name, lower, upper, bound):
    a = runs[name]
    a.homology()
    rep = verify_theorem_3_1(a.pm, a.md, a.flt, a.cpair)
    assert (rep.lower, rep.upper, rep.details["cover_bound"]) == (lower, upper, bound)
    assert rep.verdicts["theorem_3_1"] == PASS
    assert rep.verdicts["theorem_4_4"] == (PASS if a.pair.L else NA)


def test_report_json_declares_flow_hypothesis(runs):
    a = runs["circle"]
    a.homology()
    doc = verify_theorem_3_1(a.pm, a.md, a.flt, a.cpair).to_json(a.fmap.grid)
    kinds = [c["certificate"] for c in doc["certificates"]]
    assert kinds[-1] == "residual" and "flow" in kinds
    assert doc["hypotheses"]


def test_invariant_set_cover(runs):
    rep = verify_corollary_3_2(runs["torus"].md)
    assert rep.verdicts["corollary_3_2"] == PASS and rep.upper == 4


def test_invariant_set_cover_empty():
    f = load_map_json({"cells": [3], "images": {"0": [[1]], "1": [[2]], "2": ["exterior"]}})
    md = morse_decomposition(induced_map(build_index_pair(f, range(3))))
    assert verify_corollary_3_2(md).verdicts["corollary_3_2"] == NA


@pytest.mark.parametrize("name,count,required", [("circle", 2, 1), ("torus", 4, 2), ("attractor", 1, 0)])
def test_rest_points(runs, name, count, required):
    rep = runs[name].rest_points()
    assert rep.details["rest_points"] == count and rep.details["required"] == required
    assert rep.verdicts["theorem_4_6"] == PASS


def test_rest_points_fail_when_clusters_too_wide(runs):
    a = runs["torus"]
    a.homology()
    rep = verify_rest_points(a.pm, a.md, a.cup + 1, max_diameter=0)
    assert rep.details["rest_points"] == 0 and rep.verdicts["theorem_3_3"] == FAIL


def test_cycle_without_self_loop_is_not_gradient_like():
    f = load_map_json({"cells": [3], "images": {"0": [[1]], "1": [[0]], "2": ["exterior"]}})
    pm = induced_map(build_index_pair(f, {0, 1}))
    md = morse_decomposition(pm)
    with pytest.raises(GradientLikeViolation):
        verify_rest_points(pm, md, 1)


def test_cluster_diameter_wraps():
    g = build_grid([[0, 1]], [16], [True])
    assert cluster_diameter(g, [0, 15]) == 1
    g = build_grid([[0, 1]], [16], [False])
    assert cluster_diameter(g, [0, 15]) == 15
