import numpy as np
import pytest
from hypothesis import strategies as st

from bipmaps.degrees import DegreeSequence
from bipmaps.encodings import forest_from_parents
from bipmaps.sampler import LabelledForest, sample_forest

# 1-based parent list (0 marks a tree root) of the 16-vertex, 4-tree example forest
EXAMPLE_PARENTS = [0, 0, 0, 3, 4, 5, 5, 5, 5, 3, 0, 11, 12, 12, 12, 11]
EXAMPLE_LABELS = [-1, -2, 1, 0, 0, -1, -2, -1, 0, 1, 0, -1, -2, 0, -1, 0]
EXAMPLE_PATH = [0, -1, -2, -1, -1, 2, 1, 0, -1, -2, -3, -2, 0, -1, -2, -3, -4]


@pytest.fixture
def example_forest():
    return forest_from_parents(EXAMPLE_PARENTS)


@pytest.fixture
def example_labelled(example_forest):
    return LabelledForest(example_forest, np.array(EXAMPLE_LABELS))


@st.composite
def degree_sequences(draw, max_vertices=12, max_degree=4):
    """Valid forest degree sequences: pick internal degrees, then enough leaves."""
    internal = draw(st.lists(st.integers(1, max_degree), max_size=max_vertices // 2))
    edges = sum(internal)
    rho = draw(st.integers(1, 3))
    leaves = edges - len(internal) + rho
    counts = {0: leaves}
    for k in internal:
        counts[k] = counts.get(k, 0) + 1
    return DegreeSequence(counts)


@st.composite
def forests(draw, max_vertices=12, max_degree=4):
    ds = draw(degree_sequences(max_vertices, max_degree))
    seed = draw(st.integers(0, 2**32 - 1))
    return sample_forest(ds, np.random.default_rng(seed))
