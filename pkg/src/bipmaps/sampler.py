"""Exact uniform samplers: jump bridges, cyclic shifts, forests, labels, spines.

Every sampler takes a ``numpy.random.Generator``; the same generator state
gives the same output.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .degrees import DegreeSequence
from .encodings import Forest, LukasiewiczPath

__all__ = [
    "Bridge",
    "VervaatShift",
    "LabelBridge",
    "LabelledForest",
    "SpineSample",
    "ContentVector",
    "ReducedForest",
    "sample_bridge",
    "good_shifts",
    "vervaat",
    "sample_forest",
    "sample_label_bridge",
    "label_bridge_from_parts",
    "sample_labelled_forest",
    "label_forest",
    "sample_spine",
    "content_of",
    "reduce_forest",
]


@dataclass(frozen=True)
class Bridge:
    jumps: np.ndarray

    def __post_init__(self):
        j = np.array(self.jumps, dtype=np.int64)
        if j.ndim != 1 or j.size == 0:
            raise ValueError("bridge needs at least one jump")
        if j.min() < -1:
            raise ValueError("bridge jumps must be >= -1")
        if j.sum() >= 0:
            raise ValueError("bridge must end at a negative value")
        j.setflags(write=False)
        object.__setattr__(self, "jumps", j)

    @property
    def n_steps(self) -> int:
        return int(self.jumps.size)

    @property
    def roots(self) -> int:
        return int(-self.jumps.sum())

    @property
    def values(self) -> np.ndarray:
        return np.concatenate(([0], np.cumsum(self.jumps)))


@dataclass(frozen=True)
class VervaatShift:
    p: int
    i: int


def sample_bridge(ds: DegreeSequence, rng: np.random.Generator) -> Bridge:
    """Uniform ordering of the jump multiset of ``ds``."""
    return Bridge(rng.permutation(ds.jumps()))


def good_shifts(b: Bridge) -> list[int]:
    """Shift indices i in 1..n (one per level p = 0..rho-1) giving first-passage paths.

    i_p is the first time the bridge visits min + p, the minimum taken over
    times 1..n.
    """
    vals = b.values
    tail = vals[1:]
    low = int(tail.min())
    out = []
    for p in range(b.roots):
        hit = np.flatnonzero(tail == low + p)
        out.append(int(hit[0]) + 1)
    return out


def _rotate(jumps: np.ndarray, i: int) -> np.ndarray:
    return np.roll(jumps, -(i % jumps.size))


def vervaat(b: Bridge, p: int = 0) -> tuple[LukasiewiczPath, VervaatShift]:
    """Cyclic shift of the bridge at its p-th good index; returns the path and the shift."""
    if not 0 <= p < b.roots:
        raise ValueError(f"p must lie in 0..{b.roots - 1}")
    i = good_shifts(b)[p]
    steps = _rotate(b.jumps, i)
    return LukasiewiczPath(np.concatenate(([0], np.cumsum(steps)))), VervaatShift(p, i)


def sample_forest(ds: DegreeSequence, rng: np.random.Generator) -> Forest:
    """Uniform plane forest with census ``ds``: shuffle, pick a level, shift, decode."""
    jumps = rng.permutation(ds.jumps())
    p = int(rng.integers(ds.roots)) if ds.roots > 1 else 0
    w = np.cumsum(jumps)
    low = w.min()
    i = int(np.argmax(w == low + p)) + 1
    return Forest(_rotate(jumps, i) + 1)


@dataclass(frozen=True)
class LabelBridge:
    """Label increments of the k children of a vertex: ends at 0, steps >= -1."""

    values: tuple[int, ...]

    def __post_init__(self):
        vals = tuple(int(v) for v in self.values)
        if not vals:
            raise ValueError("label bridge needs at least one entry")
        if vals[-1] != 0:
            raise ValueError("label bridge must end at 0")
        prev = 0
        for i, v in enumerate(vals):
            if v - prev < -1:
                raise ValueError(f"label bridge step below -1 at position {i}")
            prev = v
        object.__setattr__(self, "values", vals)

    @property
    def k(self) -> int:
        return len(self.values)


def label_bridge_from_parts(parts) -> LabelBridge:
    """Bridge from a composition of k into k non-negative gaps (step = gap - 1)."""
    steps = np.asarray(parts, dtype=np.int64) - 1
    return LabelBridge(tuple(np.cumsum(steps)))


def sample_label_bridge(k: int, rng: np.random.Generator) -> LabelBridge:
    if k < 1:
        raise ValueError("k must be at least 1")
    out = np.empty(k, dtype=np.int64)
    _kernels.bridge_from_uniforms(k, rng.random(2 * k - 1), out, 0)
    return LabelBridge(tuple(out))


@dataclass(frozen=True)
class LabelledForest:
    forest: Forest
    labels: np.ndarray

    def __post_init__(self):
        lab = np.array(self.labels, dtype=np.int64)
        if lab.shape != (self.forest.n_vertices,):
            raise ValueError("one label per vertex required")
        lab.setflags(write=False)
        object.__setattr__(self, "labels", lab)

    def violations(self) -> list[str]:
        """Vertices whose child increments are not a valid label bridge."""
        f, lab = self.forest, self.labels
        out = []
        groups = [(-1, [int(r) for r in f.tree_roots()], 0)]
        groups += [(x, f.children(x), int(lab[x])) for x in range(f.n_vertices) if f.degrees[x]]
        for x, kids, base in groups:
            try:
                LabelBridge(tuple(int(lab[c]) - base for c in kids))
            except ValueError as exc:
                out.append(f"vertex {x}: {exc}")
        return out

    def label_process(self) -> np.ndarray:
        """Labels indexed by the forest with its extra root first (label 0)."""
        return np.concatenate(([0], self.labels))

    def to_json_obj(self) -> dict:
        obj = self.forest.to_json_obj()
        obj["labels"] = [int(v) for v in self.labels]
        return obj

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj())

    @classmethod
    def from_json_obj(cls, obj) -> "LabelledForest":
        return cls(Forest.from_json_obj(obj), np.asarray(obj["labels"], dtype=np.int64))


def n_label_uniforms(f: Forest) -> int:
    return int(2 * f.roots - 1 + np.sum(np.maximum(2 * f.degrees - 1, 0)))


def label_forest(f: Forest, rng: np.random.Generator) -> LabelledForest:
    """Uniform labelling of a fixed forest."""
    u = rng.random(n_label_uniforms(f))
    return LabelledForest(f, _kernels.labels_from_uniforms(f.degrees, f.parent, f.rank, u))


def sample_labelled_forest(ds: DegreeSequence, rng: np.random.Generator) -> LabelledForest:
    return label_forest(sample_forest(ds, rng), rng)


@dataclass(frozen=True)
class SpineSample:
    xi: np.ndarray
    chi: np.ndarray


def sample_spine(ds: DegreeSequence, h: int, rng: np.random.Generator) -> SpineSample:
    """First h draws without replacement from an urn with k*d(k) balls labelled k,
    each paired with a uniform rank in 1..label."""
    eps = ds.n_edges
    if not 0 <= h <= eps:
        raise ValueError(f"h must lie in 0..{eps}")
    labels = np.array([k for k, _ in ds.counts if k >= 1], dtype=np.int64)
    balls = np.array([k * d for k, d in ds.counts if k >= 1], dtype=np.int64)
    # the drawn colour counts form a multivariate hypergeometric vector; its
    # uniformly random arrangement is the draw order
    counts = rng.multivariate_hypergeometric(balls, h) if h else np.zeros_like(balls)
    xi = rng.permutation(np.repeat(labels, counts))
    chi = (rng.random(h) * xi).astype(np.int64) + 1
    return SpineSample(xi, chi)


@dataclass(frozen=True)
class ContentVector:
    pairs: tuple[tuple[int, int], ...]

    def __post_init__(self):
        pairs = tuple((int(k), int(j)) for k, j in self.pairs)
        for k, j in pairs:
            if not 1 <= j <= k:
                raise ValueError(f"content pair ({k}, {j}) needs 1 <= j <= k")
        object.__setattr__(self, "pairs", pairs)

    def __len__(self):
        return len(self.pairs)

    @property
    def degrees(self) -> tuple[int, ...]:
        return tuple(k for k, _ in self.pairs)


def content_of(f: Forest, x: int) -> ContentVector:
    """(children of ancestor, rank of the next vertex on the line), root side first."""
    line = f.ancestors(x) + [int(x)]
    return ContentVector(tuple((int(f.degrees[a]), int(f.rank[c])) for a, c in zip(line, line[1:])))


@dataclass(frozen=True)
class ReducedForest:
    """Forest spanned by some vertices and their ancestors.

    ``branch_data`` lists (total children, kept children, kept ranks) for each
    vertex with at least two kept children, in lexicographic order. The
    content lists, for every other kept strict ancestor in lexicographic order,
    its number of children and the rank of its kept child.
    """

    trees: int
    branch_points: int
    leaves: int
    branch_data: tuple[tuple[int, int, tuple[int, ...]], ...]
    content: ContentVector
    vertices: tuple[int, ...] = field(repr=False, default=())


def reduce_forest(f: Forest, xs) -> ReducedForest:
    xs = [int(x) for x in xs]
    if not xs:
        raise ValueError("need at least one vertex")
    keep: set[int] = set()
    for x in xs:
        v = x
        while v >= 0 and v not in keep:
            keep.add(v)
            v = int(f.parent[v])
    kids: dict[int, list[int]] = {v: [] for v in keep}
    for v in keep:
        p = int(f.parent[v])
        if p >= 0:
            kids[p].append(v)
    verts = tuple(sorted(keep))
    trees = sum(1 for v in verts if f.parent[v] < 0)
    leaves = sum(1 for v in verts if not kids[v])
    branches = []
    pairs = []
    for v in verts:
        ks = sorted(kids[v])
        if len(ks) >= 2:
            branches.append((int(f.degrees[v]), len(ks), tuple(int(f.rank[c]) for c in ks)))
        elif len(ks) == 1:
            pairs.append((int(f.degrees[v]), int(f.rank[ks[0]])))
    return ReducedForest(
        trees=trees,
        branch_points=len(branches),
        leaves=leaves,
        branch_data=tuple(branches),
        content=ContentVector(tuple(pairs)),
        vertices=verts,
    )
