"""Labelled forests to pointed bipartite maps, and map-side utilities.

The forest is first read as a mobile: internal vertices and the extra root
are unlabelled (black) nodes, each of which becomes a face; leaves carry the
labels and become map vertices. Each forest vertex z contributes one mobile
edge from its parent (or the extra root) to the leaf reached from z by
last-child steps. Closing the mobile links every white corner with label l to
the next corner with label l - 1 in clockwise contour order, and the corners
of minimal label to a new pointed vertex.

Maps are stored as parallel half-edge arrays: ``twin`` (involution), ``next``
(counterclockwise rotation around the origin vertex) and ``origin``. Faces
are the orbits of ``h -> next[twin[h]]``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import shortest_path

from . import _kernels
from .degrees import FaceDegreeSequence
from .encodings import Forest
from .sampler import LabelledForest

__all__ = [
    "PlanarMap",
    "PointedMap",
    "ClosureError",
    "forest_to_map",
    "phi_leaf",
    "map_invariant_violations",
    "bfs_distances",
    "all_pairs_distances",
    "verify_distance_law",
    "DistanceLawReport",
    "reroot_uniform_negative",
    "canonical_code",
    "double_sweep_diameter",
]


class ClosureError(RuntimeError):
    """A labelled corner found no successor during closure."""


@dataclass(frozen=True)
class PlanarMap:
    twin: np.ndarray
    next: np.ndarray
    origin: np.ndarray
    root: int
    star: int
    face: np.ndarray = field(init=False, repr=False, compare=False)
    n_faces: int = field(init=False, compare=False)

    def __post_init__(self):
        for name in ("twin", "next", "origin"):
            arr = np.array(getattr(self, name), dtype=np.int64)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        face, nf = _kernels.face_orbits(self.twin, self.next)
        face.setflags(write=False)
        object.__setattr__(self, "face", face)
        object.__setattr__(self, "n_faces", int(nf))

    def __eq__(self, other):
        return (isinstance(other, PlanarMap) and self.root == other.root and self.star == other.star
                and all(np.array_equal(getattr(self, a), getattr(other, a)) for a in ("twin", "next", "origin")))

    def __hash__(self):
        return hash((self.twin.tobytes(), self.next.tobytes(), self.root, self.star))

    @property
    def n_half_edges(self) -> int:
        return int(self.twin.size)

    @property
    def n_edges(self) -> int:
        return self.n_half_edges // 2

    @property
    def n_vertices(self) -> int:
        return int(self.origin.max()) + 1 if self.origin.size else 1

    @property
    def boundary_face(self) -> int:
        return int(self.face[self.root])

    def face_degrees(self) -> np.ndarray:
        return np.bincount(self.face, minlength=self.n_faces)

    def target(self, h: int) -> int:
        return int(self.origin[self.twin[h]])

    def boundary_half_edges(self) -> list[int]:
        """Half-edges of the root face in traversal order, starting at the root."""
        out = [int(self.root)]
        h = int(self.next[self.twin[self.root]])
        while h != self.root:
            out.append(h)
            h = int(self.next[self.twin[h]])
        return out

    def adjacency(self) -> csr_matrix:
        n = self.n_vertices
        u = self.origin
        v = self.origin[self.twin]
        data = np.ones(u.size, dtype=np.int8)
        a = csr_matrix((data, (u, v)), shape=(n, n))
        a.sum_duplicates()
        a.data[:] = 1
        return a

    def edge_list(self) -> np.ndarray:
        h = np.arange(0, self.n_half_edges)
        keep = h < self.twin
        return np.column_stack((self.origin[h[keep]], self.origin[self.twin[h[keep]]]))

    def to_json_obj(self) -> dict:
        return {
            "twin": [int(x) for x in self.twin],
            "next": [int(x) for x in self.next],
            "origin": [int(x) for x in self.origin],
            "root": int(self.root),
            "star": int(self.star),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj())

    def edges_csv(self) -> str:
        return "".join(f"{u},{v}\n" for u, v in self.edge_list())

    @classmethod
    def from_json_obj(cls, obj) -> "PlanarMap":
        return cls(obj["twin"], obj["next"], obj["origin"], int(obj["root"]), int(obj["star"]))


@dataclass(frozen=True)
class PointedMap:
    """Rooted map with a distinguished vertex; ``leaf_of_vertex`` maps map vertices
    (other than the pointed one) back to forest leaves when built from a forest."""

    map: PlanarMap
    orientation: str
    leaf_of_vertex: np.ndarray | None = field(default=None, repr=False, compare=False)

    @property
    def star(self) -> int:
        return self.map.star


def phi_leaf(f: Forest, x: int) -> int:
    return int(_kernels.rightmost_leaf(f.degrees, f.last_child)[x])


def _orientation(m: PlanarMap, dist: np.ndarray) -> str:
    a, b = int(m.origin[m.root]), m.target(m.root)
    if dist[a] == dist[b] + 1:
        return "negative"
    if dist[b] == dist[a] + 1:
        return "positive"
    return "neutral"


def forest_to_map(lf: LabelledForest) -> PointedMap:
    f = lf.forest
    phi = _kernels.rightmost_leaf(f.degrees, f.last_child)
    twin, nxt, origin, root, star, leaves = _kernels.close_mobile(
        f.degrees, f.parent, f.rank, phi, lf.labels
    )
    if root < 0:
        raise ClosureError("a labelled corner has no successor; labels are not a valid labelling")
    m = PlanarMap(twin, nxt, origin, int(root), int(star))
    return PointedMap(m, "negative", leaves)


def map_invariant_violations(m: PlanarMap, fds: FaceDegreeSequence | None = None) -> list[str]:
    """Structural audit of a half-edge map; returns human-readable violations."""
    out = []
    nh = m.n_half_edges
    h = np.arange(nh)
    if nh % 2 or np.any(m.twin[m.twin] != h) or np.any(m.twin == h):
        out.append("twin is not a fixed-point-free involution")
    if np.any(np.sort(m.next) != h):
        out.append("next is not a permutation")
    if np.any(m.origin[m.next] != m.origin):
        out.append("next does not preserve the origin vertex")
    # vertices are the orbits of next
    n_cycles = _count_cycles(m.next)
    v_ids = np.unique(m.origin)
    if n_cycles != v_ids.size or v_ids.size != m.n_vertices:
        out.append(f"rotation cycles ({n_cycles}) disagree with vertex ids ({v_ids.size})")
    chi = m.n_vertices - m.n_edges + m.n_faces
    if chi != 2:
        out.append(f"Euler characteristic {chi} != 2")
    deg = m.face_degrees()
    if np.any(deg % 2):
        out.append("a face has odd degree")
    if fds is not None:
        rho = fds.roots
        bdeg = int(deg[m.boundary_face])
        if bdeg != 2 * rho:
            out.append(f"boundary degree {bdeg} != {2 * rho}")
        inner = np.delete(deg, m.boundary_face)
        vals, cnt = np.unique(inner // 2, return_counts=True)
        got = {int(a): int(b) for a, b in zip(vals, cnt)}
        if got != dict(fds.face_counts):
            out.append(f"inner face census {got} != {dict(fds.face_counts)}")
        if m.n_vertices != fds.n_map_vertices:
            out.append(f"vertex count {m.n_vertices} != {fds.n_map_vertices}")
        if m.n_edges != fds.n_edges:
            out.append(f"edge count {m.n_edges} != {fds.n_edges}")
    return out


def _count_cycles(perm: np.ndarray) -> int:
    seen = np.zeros(perm.size, dtype=bool)
    c = 0
    for s in range(perm.size):
        if seen[s]:
            continue
        c += 1
        h = s
        while not seen[h]:
            seen[h] = True
            h = perm[h]
    return c


def bfs_distances(m: PlanarMap, source: int) -> np.ndarray:
    d = shortest_path(m.adjacency(), method="D", unweighted=True, indices=int(source))
    return d.astype(np.int64)


def all_pairs_distances(m: PlanarMap) -> np.ndarray:
    return shortest_path(m.adjacency(), method="D", unweighted=True).astype(np.int64)


def double_sweep_diameter(m: PlanarMap, rng: np.random.Generator, sweeps: int = 4) -> int:
    """Lower bound on the diameter from repeated double-sweep BFS."""
    adj = m.adjacency()
    best = 0
    for _ in range(sweeps):
        s = int(rng.integers(m.n_vertices))
        d = shortest_path(adj, method="D", unweighted=True, indices=s)
        far = int(np.argmax(d))
        d2 = shortest_path(adj, method="D", unweighted=True, indices=far)
        best = max(best, int(d.max()), int(d2.max()))
    return best


@dataclass
class DistanceLawReport:
    checked: int
    violations: list[tuple[int, int, int]]  # (map vertex, distance, expected)

    @property
    def ok(self) -> bool:
        return not self.violations


def verify_distance_law(lf: LabelledForest, pm: PointedMap) -> DistanceLawReport:
    """Leaf with label l sits at distance l - min + 1 from the pointed vertex."""
    dist = bfs_distances(pm.map, pm.star)
    leaves = pm.leaf_of_vertex
    lab = lf.labels[leaves]
    expected = lab - lf.labels.min() + 1
    got = dist[: leaves.size]
    bad = np.flatnonzero(got != expected)
    viol = [(int(v), int(got[v]), int(expected[v])) for v in bad]
    if dist[pm.star] != 0:
        viol.append((int(pm.star), int(dist[pm.star]), 0))
    return DistanceLawReport(int(leaves.size) + 1, viol)


def reroot_uniform_negative(m: PlanarMap, rng: np.random.Generator) -> PointedMap:
    """Re-root at a uniform negatively oriented half-edge of the root face."""
    dist = bfs_distances(m, m.star)
    cands = [h for h in m.boundary_half_edges()
             if dist[m.origin[h]] == dist[m.target(h)] + 1]
    new_root = cands[int(rng.integers(len(cands)))] if len(cands) > 1 else cands[0]
    nm = PlanarMap(m.twin, m.next, m.origin, int(new_root), m.star)
    return PointedMap(nm, "negative")


def boundary_orientations(m: PlanarMap) -> tuple[int, int]:
    """(negative, positive) counts over the oriented sides of root-face half-edges."""
    dist = bfs_distances(m, m.star)
    neg = pos = 0
    for h in m.boundary_half_edges():
        a, b = dist[m.origin[h]], dist[m.target(h)]
        neg += int(a == b + 1)
        pos += int(b == a + 1)
    return neg, pos


def canonical_code(pm: PointedMap | PlanarMap) -> bytes:
    """Root-first relabelling of half-edges; equal iff isomorphic as rooted pointed maps."""
    m = pm.map if isinstance(pm, PointedMap) else pm
    nh = m.n_half_edges
    new = np.full(nh, -1, dtype=np.int64)
    order = [int(m.root)]
    new[m.root] = 0
    i = 0
    while i < len(order):
        h = order[i]
        for g in (int(m.next[h]), int(m.twin[h])):
            if new[g] < 0:
                new[g] = len(order)
                order.append(g)
        i += 1
    if len(order) != nh:
        raise ValueError("map is not connected")
    old = np.asarray(order)
    nxt = new[m.next[old]]
    tw = new[m.twin[old]]
    star_h = np.flatnonzero(m.origin == m.star)
    star_tag = int(new[star_h].min()) if star_h.size else -1
    return np.concatenate(([nh, star_tag], nxt, tw)).astype(np.int64).tobytes()
