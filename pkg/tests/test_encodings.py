import numpy as np
import pytest
from hypothesis import given, strategies as st

from bipmaps.encodings import (
    Forest,
    LukasiewiczPath,
    PathValidationError,
    check_sibling_path_identities,
    forest_from_parents,
    forest_to_lukasiewicz,
    height_process,
    lambda_jumps,
    lr_counts,
    lukasiewicz_to_forest,
    zeta_jumps,
)

from conftest import EXAMPLE_PATH, forests


def test_cherry_path_and_height():
    f = Forest([2, 0, 0])
    assert forest_to_lukasiewicz(f).values.tolist() == [0, 1, 0, -1]
    assert height_process(f).values.tolist() == [0, 1, 1]
    assert lukasiewicz_to_forest(LukasiewiczPath([0, 1, 0, -1])) == f


def test_two_singletons():
    f = Forest([0, 0])
    assert f.roots == 2
    assert forest_to_lukasiewicz(f).values.tolist() == [0, -1, -2]
    assert height_process(f).values.tolist() == [0, 0]
    assert lukasiewicz_to_forest(LukasiewiczPath([0, -1, -2])) == f


def test_example_forest_path(example_forest):
    w = forest_to_lukasiewicz(example_forest)
    assert w.values.tolist() == EXAMPLE_PATH
    assert w.roots == 4


def test_example_forest_heights(example_forest):
    h = height_process(example_forest).values
    # vertices of the 4-tree example: the deepest ones sit three edges below their roots
    assert h.tolist() == [0, 0, 0, 1, 2, 3, 3, 3, 3, 1, 0, 1, 2, 2, 2, 1]
    assert example_forest.max_height() == 3


def test_right_count_example(example_forest):
    # 8th vertex in lexicographic order
    assert lr_counts(example_forest, 7)[1] == 2
    w = np.asarray([0] + EXAMPLE_PATH)
    assert w[8] - w[:9].min() == 2


def test_roots_have_no_branching(example_forest):
    for r in example_forest.tree_roots():
        assert lr_counts(example_forest, int(r)) == (0, 0, 0)


@pytest.mark.parametrize(
    "values,index",
    [([0, -2], 0), ([1, 0], 0), ([0, -1, 0, -1], 2), ([0, 1, 0], 1)],
)
def test_invalid_paths(values, index):
    with pytest.raises(PathValidationError) as exc:
        LukasiewiczPath(values)
    assert exc.value.index >= 0


def test_lambda_and_zeta_examples():
    w = LukasiewiczPath([0, 1, 0, -1])
    assert lambda_jumps(w, [-1], 3) == 2
    assert lambda_jumps(w, [], 3) == 0
    assert lambda_jumps(w, [-1, 1], 3) == 3
    assert zeta_jumps(w, [-1], 1) == 2
    with pytest.raises(ValueError):
        zeta_jumps(w, [0], 1)


def test_sibling_identities_examples(example_forest):
    assert check_sibling_path_identities(Forest([2, 0, 0])) == []
    assert check_sibling_path_identities(example_forest) == []


def test_parent_list_round_trip(example_forest):
    parents = [int(p) + 1 for p in example_forest.parent]
    assert forest_from_parents(parents) == example_forest
    assert Forest.from_json(example_forest.to_json()) == example_forest


@given(forests())
def test_path_round_trip(f):
    w = forest_to_lukasiewicz(f)
    assert lukasiewicz_to_forest(w) == f
    assert w.values[-1] == -f.roots
    assert np.all(w.values[:-1] > -f.roots)


@given(forests())
def test_structure_invariants(f):
    assert f.degrees.sum() == f.n_vertices - f.roots
    roots = f.tree_roots()
    assert len(roots) == f.roots
    for x in range(f.n_vertices):
        kids = f.children(x)
        assert kids == sorted(kids)
        assert [int(f.rank[c]) for c in kids] == list(range(1, len(kids) + 1))
        assert all(f.parent[c] == x for c in kids)
        if f.parent[x] >= 0:
            assert f.height[x] == f.height[f.parent[x]] + 1
        else:
            assert f.height[x] == 0


@given(forests())
def test_sibling_identities_random(f):
    assert check_sibling_path_identities(f) == []


@given(forests())
def test_lr_matches_brute_force(f):
    for x in range(f.n_vertices):
        anc = set(f.ancestors(x))
        left = right = 0
        for y in range(f.n_vertices):
            p = int(f.parent[y])
            if p in anc and y not in anc and y != x:
                # y branches off the line; its side follows from lexicographic order
                if y < x:
                    left += 1
                else:
                    right += 1
        assert lr_counts(f, x) == (left, right, left + right)


@given(forests(), st.data())
def test_lambda_zeta_inverse(f, data):
    w = forest_to_lukasiewicz(f)
    values = data.draw(st.sets(st.integers(-1, 3), min_size=1))
    total = lambda_jumps(w, values, w.n_vertices)
    for p in range(1, total + 1):
        r = zeta_jumps(w, values, p)
        assert lambda_jumps(w, values, r) == p
        assert lambda_jumps(w, values, r - 1) == p - 1


@given(forests())
def test_lambda_all_values_counts_steps(f):
    w = forest_to_lukasiewicz(f)
    values = set(w.jumps.tolist())
    assert lambda_jumps(w, values, w.n_vertices) == w.n_vertices
