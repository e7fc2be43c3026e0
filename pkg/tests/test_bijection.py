import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bipmaps.bijection import (
    ClosureError,
    PlanarMap,
    all_pairs_distances,
    bfs_distances,
    boundary_orientations,
    canonical_code,
    double_sweep_diameter,
    forest_to_map,
    map_invariant_violations,
    phi_leaf,
    reroot_uniform_negative,
    verify_distance_law,
)
from bipmaps.degrees import DegreeSequence, FaceDegreeSequence, count_labelled_forests, forest_to_face_degrees
from bipmaps.encodings import Forest
from bipmaps.oracle import enumerate_labelled_forests
from bipmaps.sampler import LabelledForest, label_forest, sample_labelled_forest

from conftest import forests


def _unpointed(m):
    return PlanarMap(m.twin, m.next, m.origin, m.root, -1)


def test_single_edge_map():
    lf = LabelledForest(Forest([0]), [0])
    pm = forest_to_map(lf)
    m = pm.map
    assert (m.n_edges, m.n_vertices, m.n_faces) == (1, 2, 1)
    assert map_invariant_violations(m, FaceDegreeSequence({}, 1)) == []
    assert sorted(bfs_distances(m, pm.star).tolist()) == [0, 1]
    assert verify_distance_law(lf, pm).ok


def test_cherry_gives_one_quadrangle():
    fds = FaceDegreeSequence({2: 1}, 1)
    for lf in enumerate_labelled_forests(DegreeSequence({0: 2, 2: 1})):
        m = forest_to_map(lf).map
        assert m.n_edges == 3 and m.n_vertices == 3
        assert sorted(m.face_degrees().tolist()) == [2, 4]
        assert m.face_degrees()[m.boundary_face] == 2
        assert map_invariant_violations(m, fds) == []


def test_one_face_quadrangulations_have_two_codes():
    lfs = list(enumerate_labelled_forests(DegreeSequence({0: 2, 2: 1})))
    pointed = {canonical_code(forest_to_map(lf)) for lf in lfs}
    plain = {canonical_code(_unpointed(forest_to_map(lf).map)) for lf in lfs}
    assert len(pointed) == 3
    assert len(plain) == 2


def test_example_forest_closes_to_the_expected_map(example_labelled):
    pm = forest_to_map(example_labelled)
    fds = FaceDegreeSequence({1: 1, 2: 2, 3: 1, 4: 1}, 4)
    assert forest_to_face_degrees(DegreeSequence(example_labelled.forest.degree_census())) == fds
    assert map_invariant_violations(pm.map, fds) == []
    assert verify_distance_law(example_labelled, pm).ok


def test_invalid_labels_raise():
    with pytest.raises((ClosureError, ValueError)):
        forest_to_map(LabelledForest(Forest([2, 0, 0]), [0, 3, 0]))


@pytest.mark.parametrize("counts", [{0: 3, 2: 2}, {0: 4, 1: 1, 3: 1}, {0: 3, 1: 1}, {0: 3, 2: 1}])
def test_enumerated_maps_injective_and_sound(counts):
    ds = DegreeSequence(counts)
    fds = forest_to_face_degrees(ds)
    codes = set()
    for lf in enumerate_labelled_forests(ds):
        pm = forest_to_map(lf)
        assert map_invariant_violations(pm.map, fds) == []
        assert verify_distance_law(lf, pm).ok
        codes.add(canonical_code(pm))
    assert len(codes) == count_labelled_forests(ds)


def test_canonical_code_stable():
    lf = sample_labelled_forest(DegreeSequence({0: 6, 2: 1, 3: 1, 1: 2}), np.random.default_rng(2))
    m = forest_to_map(lf).map
    again = PlanarMap.from_json_obj(m.to_json_obj())
    assert canonical_code(m) == canonical_code(again)


def test_canonical_code_ignores_half_edge_names():
    lf = sample_labelled_forest(DegreeSequence({0: 6, 2: 1, 3: 1, 1: 2}), np.random.default_rng(9))
    m = forest_to_map(lf).map
    perm = np.random.default_rng(0).permutation(m.n_half_edges)
    inv = np.argsort(perm)
    relabelled = PlanarMap(inv[m.twin[perm]], inv[m.next[perm]], m.origin[perm], int(inv[m.root]), m.star)
    assert canonical_code(relabelled) == canonical_code(m)


def test_phi_examples():
    f = Forest([2, 0, 0])
    assert phi_leaf(f, 1) == 1
    assert phi_leaf(f, 0) == 2


@given(forests())
def test_phi_brute_force(f):
    for x in range(f.n_vertices):
        v = x
        while f.degrees[v]:
            v = f.children(v)[-1]
        assert phi_leaf(f, x) == v


@settings(max_examples=60, deadline=None)
@given(forests(max_vertices=16), st.integers(0, 2**32 - 1))
def test_random_maps_are_sound(f, seed):
    lf = label_forest(f, np.random.default_rng(seed))
    pm = forest_to_map(lf)
    assert map_invariant_violations(pm.map, forest_to_face_degrees(DegreeSequence(f.degree_census()))) == []
    assert verify_distance_law(lf, pm).ok
    neg, pos = boundary_orientations(pm.map)
    assert neg == pos == f.roots


@settings(max_examples=30, deadline=None)
@given(forests(max_vertices=16), st.integers(0, 2**32 - 1))
def test_triangle_inequality(f, seed):
    rng = np.random.default_rng(seed)
    m = forest_to_map(label_forest(f, rng)).map
    d = all_pairs_distances(m)
    a, b, c = rng.integers(m.n_vertices, size=(3, 20))
    assert np.all(d[a, c] <= d[a, b] + d[b, c])


def test_double_sweep_is_a_lower_bound():
    ds = DegreeSequence({0: 4, 1: 1, 3: 1})
    rng = np.random.default_rng(0)
    for lf in enumerate_labelled_forests(ds):
        m = forest_to_map(lf).map
        assert double_sweep_diameter(m, rng) <= all_pairs_distances(m).max()


def test_reroot_picks_a_negative_edge():
    ds = DegreeSequence({0: 5, 2: 3}, 2)
    rng = np.random.default_rng(3)
    m = forest_to_map(sample_labelled_forest(ds, rng)).map
    d = bfs_distances(m, m.star)
    new = reroot_uniform_negative(m, rng).map
    assert d[new.origin[new.root]] == d[new.target(new.root)] + 1
    assert new.root in m.boundary_half_edges()
    again = reroot_uniform_negative(m, np.random.default_rng(3))
    assert reroot_uniform_negative(m, np.random.default_rng(3)).map.root == again.map.root


def test_single_boundary_edge_has_one_negative_side():
    m = forest_to_map(sample_labelled_forest(DegreeSequence({0: 2, 2: 1, 1: 1}), np.random.default_rng(0))).map
    assert boundary_orientations(m) == (1, 1)


def test_json_and_csv_outputs():
    m = forest_to_map(LabelledForest(Forest([2, 0, 0]), [0, 1, 0])).map
    assert PlanarMap.from_json_obj(m.to_json_obj()) == m
    assert m.edges_csv().count("\n") == m.n_edges
