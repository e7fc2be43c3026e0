"""Degree sequences of plane forests and face-degree sequences of bipartite maps.

A forest degree sequence ``d`` records how many vertices have ``k`` children.
A face-degree sequence records how many inner faces have degree ``2k``; it
maps to a forest degree sequence by adding the leaves, which become the
non-pointed vertices of the map.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

import numpy as np

__all__ = [
    "DegreeSequence",
    "FaceDegreeSequence",
    "InvalidDegreeSequence",
    "face_to_forest_degrees",
    "count_forests",
    "count_labelled_forests",
    "count_maps",
    "family_generator",
    "FAMILIES",
]


class InvalidDegreeSequence(ValueError):
    """Raised when a degree sequence violates a structural constraint."""


def _normalise(counts, min_key: int) -> tuple[tuple[int, int], ...]:
    if isinstance(counts, Mapping):
        items = counts.items()
    else:
        items = counts
    acc: dict[int, int] = {}
    for item in items:
        try:
            k, d = (int(v) for v in item)
        except (TypeError, ValueError):
            raise InvalidDegreeSequence(f"expected a (degree, count) pair, got {item!r}") from None
        if k < min_key:
            raise InvalidDegreeSequence(f"degree {k} below minimum {min_key}")
        if d < 0:
            raise InvalidDegreeSequence(f"negative count {d} for degree {k}")
        acc[k] = acc.get(k, 0) + d
    return tuple((k, d) for k, d in sorted(acc.items()) if d > 0)


def _pairs_from_json(obj):
    # accept {"k": d} as well as [[k, d], ...]
    return obj if isinstance(obj, Mapping) else [tuple(p) if isinstance(p, list) else p for p in obj]


@dataclass(frozen=True)
class DegreeSequence:
    """Sparse out-degree census of a plane forest with ``roots`` trees.

    ``counts`` accepts a mapping ``{k: d(k)}`` or pairs; it is stored as a
    sorted tuple of ``(k, d(k))`` with ``d(k) > 0``. When ``roots`` is None it
    is inferred as ``sum((1-k) d(k))``; otherwise it must agree with that sum.
    """

    counts: tuple[tuple[int, int], ...]
    roots: int | None = None

    def __post_init__(self):
        pairs = _normalise(self.counts, 0)
        object.__setattr__(self, "counts", pairs)
        forced = sum((1 - k) * d for k, d in pairs)
        if self.roots is None:
            object.__setattr__(self, "roots", forced)
        if self.roots != forced:
            raise InvalidDegreeSequence(
                f"roots must equal sum (1-k) d(k) = {forced}, got {self.roots}"
            )
        if not pairs:
            raise InvalidDegreeSequence("empty degree sequence (need at least one vertex)")
        if self.roots < 1:
            raise InvalidDegreeSequence(
                f"sum (1-k) d(k) = {forced} must be a positive number of roots"
            )

    @classmethod
    def from_counts(cls, counts, roots: int | None = None) -> "DegreeSequence":
        return cls(counts, roots)

    # derived quantities
    def d(self, k: int) -> int:
        for kk, dd in self.counts:
            if kk == k:
                return dd
        return 0

    def as_dict(self) -> dict[int, int]:
        return dict(self.counts)

    @property
    def n_vertices(self) -> int:
        return sum(d for _, d in self.counts)

    @property
    def n_edges(self) -> int:
        return sum(k * d for k, d in self.counts)

    @property
    def n_leaves(self) -> int:
        return self.d(0)

    @property
    def n_internal(self) -> int:
        return self.n_vertices - self.n_leaves

    @property
    def global_variance(self) -> int:
        """Sum of k(k-1) d(k); its square root sets the height and distance scale."""
        return sum(k * (k - 1) * d for k, d in self.counts)

    @property
    def sigma(self) -> float:
        return math.sqrt(self.global_variance)

    @property
    def max_degree(self) -> int:
        return self.counts[-1][0]

    def degree_one_slack(self) -> float:
        """Largest delta with d(1) <= (1 - delta) * edges; 1.0 when there are no edges."""
        eps = self.n_edges
        if eps == 0:
            return 1.0
        return 1.0 - self.d(1) / eps

    def jumps(self) -> np.ndarray:
        """Sorted multiset of path increments ``k - 1``, one per vertex."""
        return np.repeat(
            np.array([k - 1 for k, _ in self.counts], dtype=np.int64),
            np.array([d for _, d in self.counts], dtype=np.int64),
        )

    def summary(self) -> dict:
        return {
            "rho": self.roots,
            "vertices": self.n_vertices,
            "edges": self.n_edges,
            "leaves": self.n_leaves,
            "sigma2": self.global_variance,
            "max_degree": self.max_degree,
        }

    # serialisation
    def to_json_obj(self) -> dict:
        return {"rho": self.roots, "counts": [[k, d] for k, d in self.counts]}

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj())

    @classmethod
    def from_json_obj(cls, obj) -> "DegreeSequence":
        if "counts" not in obj:
            raise InvalidDegreeSequence("missing key 'counts'")
        return cls(_pairs_from_json(obj["counts"]), obj.get("rho"))

    @classmethod
    def from_json(cls, text: str) -> "DegreeSequence":
        return cls.from_json_obj(json.loads(text))


@dataclass(frozen=True)
class FaceDegreeSequence:
    """Inner-face census of a bipartite map with boundary of length ``2 * boundary_half_length``.

    ``face_counts`` maps ``k >= 1`` to the number of inner faces of degree
    ``2k``; an empty census is the single-edge-like tree map.
    """

    face_counts: tuple[tuple[int, int], ...]
    boundary_half_length: int = 1

    def __post_init__(self):
        object.__setattr__(self, "face_counts", _normalise(self.face_counts, 1))
        if int(self.boundary_half_length) < 1:
            raise InvalidDegreeSequence("boundary half-length must be positive")
        object.__setattr__(self, "boundary_half_length", int(self.boundary_half_length))

    @property
    def roots(self) -> int:
        return self.boundary_half_length

    def f(self, k: int) -> int:
        return dict(self.face_counts).get(k, 0)

    @property
    def n_faces(self) -> int:
        return sum(c for _, c in self.face_counts)

    @property
    def n_edges(self) -> int:
        return self.roots + sum(k * c for k, c in self.face_counts)

    @property
    def n_map_vertices(self) -> int:
        """Vertex count including the pointed vertex, by Euler's formula."""
        return self.n_edges - self.n_faces + 1

    def to_forest(self) -> DegreeSequence:
        return face_to_forest_degrees(self)

    def to_json_obj(self) -> dict:
        return {"rho": self.roots, "face_counts": [[k, c] for k, c in self.face_counts]}

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj())

    @classmethod
    def from_json_obj(cls, obj) -> "FaceDegreeSequence":
        if "face_counts" not in obj:
            raise InvalidDegreeSequence("missing key 'face_counts'")
        return cls(_pairs_from_json(obj["face_counts"]), obj.get("rho", 1))

    @classmethod
    def from_json(cls, text: str) -> "FaceDegreeSequence":
        return cls.from_json_obj(json.loads(text))


def face_to_forest_degrees(fds: FaceDegreeSequence) -> DegreeSequence:
    rho = fds.roots
    leaves = rho + sum((k - 1) * c for k, c in fds.face_counts)
    return DegreeSequence(((0, leaves),) + fds.face_counts, rho)


def forest_to_face_degrees(ds: DegreeSequence) -> FaceDegreeSequence:
    return FaceDegreeSequence(tuple((k, d) for k, d in ds.counts if k >= 1), ds.roots)


def count_forests(ds: DegreeSequence) -> int:
    """Number of plane forests with ``roots`` ordered trees and census ``ds``."""
    num = ds.roots * math.factorial(ds.n_vertices - 1)
    den = math.prod(math.factorial(d) for _, d in ds.counts)
    q, r = divmod(num, den)
    assert r == 0
    return q


def label_bridge_count(k: int) -> int:
    """Size of the set of label increment bridges for a vertex with k children."""
    return math.comb(2 * k - 1, k - 1)


def count_labelled_forests(ds: DegreeSequence) -> int:
    out = count_forests(ds) * label_bridge_count(ds.roots)
    for k, d in ds.counts:
        if k >= 1:
            out *= label_bridge_count(k) ** d
    return out


def count_maps(fds: FaceDegreeSequence) -> int:
    """Number of rooted bipartite maps with the given inner faces and boundary 2*rho."""
    ds = face_to_forest_degrees(fds)
    rho = ds.roots
    val = Fraction(2 * rho * math.factorial(ds.n_vertices - 1), math.factorial(ds.n_leaves + 1))
    val *= math.comb(2 * rho - 1, rho - 1)
    for k, c in fds.face_counts:
        val *= Fraction(label_bridge_count(k) ** c, math.factorial(c))
    assert val.denominator == 1
    return int(val)


# -- families ---------------------------------------------------------------

def _two_p(size: int, params: Mapping, rng) -> FaceDegreeSequence:
    p = int(params.get("p", 2))
    return FaceDegreeSequence({p: size}, int(params.get("rho", 1)))


def _quadrangulation(size: int, params: Mapping, rng) -> FaceDegreeSequence:
    return FaceDegreeSequence({2: size}, int(params.get("rho", 1)))


def _geometric(size: int, params: Mapping, rng) -> FaceDegreeSequence:
    # half-degree k >= 2 with P(k) = (1-q) q^(k-2)
    q = float(params.get("q", 0.5))
    ks = rng.geometric(1.0 - q, size=size) + 1
    return FaceDegreeSequence(_tally(ks), int(params.get("rho", 1)))


def _power_law(size: int, params: Mapping, rng) -> FaceDegreeSequence:
    # half-degree k = 1 + Z with Z Zipf(1 + alpha), so k >= 2 and P(k) ~ (k-1)^-(1+alpha)
    alpha = float(params.get("alpha", 1.5))
    ks = rng.zipf(1.0 + alpha, size=size) + 1
    return FaceDegreeSequence(_tally(ks), int(params.get("rho", 1)))


def _mixed(size: int, params: Mapping, rng) -> FaceDegreeSequence:
    # half-degrees 1..4 in proportion 1:2:1:1, boundary 2*4 by default
    weights = {1: 1, 2: 2, 3: 1, 4: 1}
    total = sum(weights.values())
    counts = {k: size * w // total for k, w in weights.items()}
    left = size - sum(counts.values())
    for k in (2, 1, 3, 4):
        if left == 0:
            break
        counts[k] += 1
        left -= 1
    return FaceDegreeSequence(counts, int(params.get("rho", 4)))


def _big_face(size: int, params: Mapping, rng) -> FaceDegreeSequence:
    # size-1 quadrangles plus one face of half-degree K = 2(size-1), making sigma = K exactly
    if size < 2:
        raise InvalidDegreeSequence("big-face family needs size >= 2")
    big = 2 * (size - 1)
    return FaceDegreeSequence({2: size - 1, big: 1}, int(params.get("rho", 1)))


def _tally(ks) -> dict[int, int]:
    vals, cnt = np.unique(np.asarray(ks, dtype=np.int64), return_counts=True)
    return {int(k): int(c) for k, c in zip(vals, cnt)}


FAMILIES = {
    "2p-angulation": _two_p,
    "2p": _two_p,
    "quadrangulation": _quadrangulation,
    "geometric": _geometric,
    "power-law": _power_law,
    "mixed": _mixed,
    "big-face": _big_face,
}


def family_generator(name: str, size: int, params: Mapping | None = None) -> FaceDegreeSequence:
    """Face-degree sequence with ``size`` inner faces from a named family.

    Random families read an integer ``seed`` from ``params`` (default 0).
    """
    params = dict(params or {})
    if name not in FAMILIES:
        raise InvalidDegreeSequence(f"unknown family {name!r}; choose from {sorted(FAMILIES)}")
    if size < 0:
        raise InvalidDegreeSequence("family size must be non-negative")
    rng = np.random.default_rng(int(params.get("seed", 0)))
    return FAMILIES[name](int(size), params, rng)


def iter_degree_sequences(max_vertices: int) -> Iterable[DegreeSequence]:
    """All valid forest degree sequences with at most ``max_vertices`` vertices."""
    from itertools import combinations_with_replacement

    for n in range(1, max_vertices + 1):
        for combo in combinations_with_replacement(range(n), n):
            if sum(1 - k for k in combo) >= 1:
                yield DegreeSequence(_tally(combo))
