from collections import Counter
from itertools import permutations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats as sps

from bipmaps.degrees import DegreeSequence
from bipmaps.encodings import Forest, LukasiewiczPath, lukasiewicz_to_forest
from bipmaps.sampler import (
    Bridge,
    ContentVector,
    LabelBridge,
    content_of,
    good_shifts,
    label_forest,
    reduce_forest,
    sample_bridge,
    sample_forest,
    sample_label_bridge,
    sample_labelled_forest,
    sample_spine,
    vervaat,
)

from conftest import degree_sequences, forests


def test_bridge_sampler_three_orderings():
    ds = DegreeSequence({0: 2, 2: 1})
    rng = np.random.default_rng(3)
    seen = Counter(tuple(sample_bridge(ds, rng).jumps) for _ in range(6000))
    assert set(seen) == set(permutations((1, -1, -1)))
    assert sps.chisquare(list(seen.values())).pvalue > 1e-3


def test_bridge_sampler_single_vertex():
    b = sample_bridge(DegreeSequence({0: 1}), np.random.default_rng(0))
    assert b.jumps.tolist() == [-1]


def test_samplers_deterministic():
    ds = DegreeSequence({0: 5, 2: 2, 3: 1})
    a = sample_labelled_forest(ds, np.random.default_rng(11))
    b = sample_labelled_forest(ds, np.random.default_rng(11))
    assert a.forest == b.forest and np.array_equal(a.labels, b.labels)


def test_good_shift_examples():
    assert good_shifts(Bridge([-1, -1, 1])) == [2]
    assert good_shifts(Bridge([-1])) == [1]


def test_vervaat_example():
    w, shift = vervaat(Bridge([-1, -1, 1]), 0)
    assert w.jumps.tolist() == [1, -1, -1]
    assert w.values.tolist() == [0, 1, 0, -1]
    assert shift.i == 2


def test_vervaat_on_first_passage_path_is_full_rotation():
    b = Bridge([1, -1, -1])
    w, shift = vervaat(b, 0)
    assert shift.i == 3
    assert w.jumps.tolist() == [1, -1, -1]


def _first_passage(jumps):
    try:
        LukasiewiczPath(np.concatenate(([0], np.cumsum(jumps))))
        return True
    except ValueError:
        return False


@given(degree_sequences(max_vertices=8), st.integers(0, 2**32 - 1))
def test_good_shifts_are_exactly_the_valid_rotations(ds, seed):
    b = sample_bridge(ds, np.random.default_rng(seed))
    n = b.n_steps
    valid = [i for i in range(1, n + 1) if _first_passage(np.roll(b.jumps, -(i % n)))]
    assert sorted(good_shifts(b)) == valid
    assert len(valid) == ds.roots


@given(degree_sequences(), st.integers(0, 2**32 - 1))
def test_vervaat_decodes_to_the_degree_census(ds, seed):
    b = sample_bridge(ds, np.random.default_rng(seed))
    for p in range(ds.roots):
        f = lukasiewicz_to_forest(vervaat(b, p)[0])
        assert f.degree_census() == dict(ds.counts)


def test_forest_sampler_small_cases():
    rng = np.random.default_rng(5)
    assert sample_forest(DegreeSequence({0: 2, 2: 1}), rng) == Forest([2, 0, 0])
    assert sample_forest(DegreeSequence({0: 1}), rng) == Forest([0])
    seen = Counter(tuple(sample_forest(DegreeSequence({0: 3, 2: 2}), rng).degrees) for _ in range(4000))
    assert set(seen) == {(2, 2, 0, 0, 0), (2, 0, 2, 0, 0)}
    assert sps.chisquare(list(seen.values())).pvalue > 1e-3


def test_label_bridge_supports():
    rng = np.random.default_rng(8)
    assert sample_label_bridge(1, rng).values == (0,)
    two = Counter(sample_label_bridge(2, rng).values for _ in range(3000))
    assert set(two) == {(-1, 0), (0, 0), (1, 0)}
    three = Counter(sample_label_bridge(3, rng).values for _ in range(5000))
    assert len(three) == 10
    assert sps.chisquare(list(three.values())).pvalue > 1e-3


@pytest.mark.parametrize("values", [(0, 1), (-2, 0), ()])
def test_label_bridge_validation(values):
    with pytest.raises(ValueError):
        LabelBridge(values)


def test_labelled_forest_small_cases():
    rng = np.random.default_rng(1)
    lf = sample_labelled_forest(DegreeSequence({0: 1}), rng)
    assert lf.labels.tolist() == [0]
    seen = Counter(tuple(sample_labelled_forest(DegreeSequence({0: 2, 2: 1}), rng).labels)
                   for _ in range(3000))
    assert set(seen) == {(0, -1, 0), (0, 0, 0), (0, 1, 0)}


@given(forests(), st.integers(0, 2**32 - 1))
def test_sampled_labels_are_valid(f, seed):
    lf = label_forest(f, np.random.default_rng(seed))
    assert lf.violations() == []


def test_broken_labels_reported(example_labelled):
    lab = example_labelled.labels.copy()
    lab[5] += 3
    assert type(example_labelled)(example_labelled.forest, lab).violations()


def test_spine_small_cases():
    rng = np.random.default_rng(0)
    ds = DegreeSequence({0: 2, 2: 1})
    s = sample_spine(ds, 2, rng)
    assert s.xi.tolist() == [2, 2]
    assert all(1 <= c <= 2 for c in s.chi)
    ds = DegreeSequence({0: 5, 2: 1, 3: 1})
    full = sample_spine(ds, ds.n_edges, rng)
    assert sorted(full.xi.tolist()) == [2, 2, 3, 3, 3]


def test_spine_first_draw_mean():
    ds = DegreeSequence({0: 7, 1: 2, 2: 2, 4: 1})
    rng = np.random.default_rng(4)
    xi = np.array([sample_spine(ds, 1, rng).xi[0] for _ in range(20000)])
    target = ds.global_variance / ds.n_edges
    se = xi.std() / np.sqrt(xi.size)
    assert abs((xi - 1).mean() - target) < 3 * se


def test_content_examples():
    f = Forest([3, 0, 0, 0])
    assert content_of(f, 0) == ContentVector(())
    assert content_of(f, 2).pairs == ((3, 2),)


@given(forests())
def test_content_reconstructs_the_line(f):
    for x in range(f.n_vertices):
        c = content_of(f, x)
        assert len(c) == f.height[x]
        # walk down from the root by child rank
        v = int(f.ancestors(x)[0]) if c.pairs else x
        for k, j in c.pairs:
            assert f.degrees[v] == k
            v = f.children(v)[j - 1]
        assert v == x


def test_reduce_examples():
    f = Forest([2, 0, 0])
    one = reduce_forest(f, [1])
    assert (one.branch_points, one.trees, one.leaves) == (0, 1, 1)
    assert one.content == content_of(f, 1)
    two = reduce_forest(f, [1, 2])
    assert (two.trees, two.branch_points, two.leaves) == (1, 1, 2)
    assert two.branch_data == ((2, 2, (1, 2)),)


@settings(max_examples=50)
@given(forests())
def test_reduce_distinct_trees(f):
    roots = [int(r) for r in f.tree_roots()]
    red = reduce_forest(f, roots)
    assert red.trees == len(roots)
    assert red.leaves == len(roots)
    assert red.branch_points == 0
