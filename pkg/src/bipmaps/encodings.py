"""Plane forests and their path encodings.

Vertices are numbered 0..n-1 in lexicographic order (depth first, children
left to right, trees one after another). JSON uses 1-based ids with 0 as the
tree-root marker. The extra root above the trees is implicit.

Path convention: W(0) = 0 and W(j+1) = W(j) + k(x_j) - 1, so a forest with
rho trees ends at W(n) = -rho, which it hits for the first time there.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from . import _kernels

__all__ = [
    "PathValidationError",
    "Forest",
    "LukasiewiczPath",
    "HeightProcess",
    "forest_to_lukasiewicz",
    "lukasiewicz_to_forest",
    "height_process",
    "lr_counts",
    "lambda_jumps",
    "zeta_jumps",
    "check_sibling_path_identities",
    "forest_from_parents",
]


class PathValidationError(ValueError):
    """Malformed path or degree word; ``index`` is the first offending position."""

    def __init__(self, message: str, index: int):
        super().__init__(f"{message} (at index {index})")
        self.index = index


def _first_passage_error(steps: np.ndarray) -> tuple[str, int] | None:
    """Check that the walk with these increments first hits its final value at the end."""
    if steps.size == 0:
        return "empty path", 0
    bad = np.flatnonzero(steps < -1)
    if bad.size:
        return "increment below -1", int(bad[0]) + 1
    w = np.cumsum(steps)
    final = int(w[-1])
    if final >= 0:
        return f"terminal value {final} is not negative", int(steps.size)
    early = np.flatnonzero(w[:-1] <= final)
    if early.size:
        return f"path reaches {final} before the end", int(early[0]) + 1
    return None


@dataclass(frozen=True)
class Forest:
    """Plane forest given by its out-degree word in lexicographic order."""

    degrees: np.ndarray
    parent: np.ndarray = field(init=False, repr=False, compare=False)
    rank: np.ndarray = field(init=False, repr=False, compare=False)
    tree_index: np.ndarray = field(init=False, repr=False, compare=False)
    height: np.ndarray = field(init=False, repr=False, compare=False)
    last_child: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        k = np.array(self.degrees, dtype=np.int64)
        if k.ndim != 1:
            raise PathValidationError("degree word must be one-dimensional", 0)
        if k.size and k.min() < 0:
            raise PathValidationError("negative out-degree", int(np.argmax(k < 0)))
        err = _first_passage_error(k - 1)
        if err is not None:
            raise PathValidationError(*err)
        k.setflags(write=False)
        object.__setattr__(self, "degrees", k)
        arrays = _kernels.forest_structure(k)
        for name, arr in zip(("parent", "rank", "tree_index", "height", "last_child"), arrays):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    def __eq__(self, other):
        return isinstance(other, Forest) and np.array_equal(self.degrees, other.degrees)

    def __hash__(self):
        return hash(self.degrees.tobytes())

    @property
    def n_vertices(self) -> int:
        return int(self.degrees.size)

    @property
    def roots(self) -> int:
        return int(self.n_vertices - self.degrees.sum())

    @property
    def child_counts(self) -> np.ndarray:
        return self.degrees

    def children(self, x: int) -> list[int]:
        if self.degrees[x] == 0:
            return []
        out = [x + 1]
        while len(out) < self.degrees[x]:
            out.append(self._subtree_end(out[-1]))
        return out

    def tree_roots(self) -> np.ndarray:
        return np.flatnonzero(self.parent < 0)

    def _subtree_end(self, x: int) -> int:
        """First vertex after the subtree of x."""
        need = 1
        y = x
        while need:
            need += int(self.degrees[y]) - 1
            y += 1
        return y

    def ancestors(self, x: int) -> list[int]:
        """Strict ancestors of x from the tree root down to its parent."""
        out = []
        p = int(self.parent[x])
        while p >= 0:
            out.append(p)
            p = int(self.parent[p])
        return out[::-1]

    def is_ancestor(self, a: int, x: int) -> bool:
        """True when a is a strict ancestor of x."""
        if a >= x or self.tree_index[a] != self.tree_index[x]:
            return False
        return x < self._subtree_end(a)

    def degree_census(self) -> dict[int, int]:
        vals, cnt = np.unique(self.degrees, return_counts=True)
        return {int(a): int(b) for a, b in zip(vals, cnt)}

    def width(self) -> int:
        """Largest number of vertices sharing one generation."""
        return int(np.bincount(self.height).max())

    def max_height(self) -> int:
        return int(self.height.max())

    # serialisation
    def to_json_obj(self) -> dict:
        return {
            "rho": self.roots,
            "parents": [int(p) + 1 for p in self.parent],
            "k": [int(k) for k in self.degrees],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj())

    @classmethod
    def from_json_obj(cls, obj) -> "Forest":
        f = cls(np.asarray(obj["k"], dtype=np.int64))
        if "parents" in obj and [int(p) + 1 for p in f.parent] != list(obj["parents"]):
            raise PathValidationError("parents disagree with the degree word", 0)
        if "rho" in obj and obj["rho"] != f.roots:
            raise PathValidationError("rho disagrees with the degree word", 0)
        return f

    @classmethod
    def from_json(cls, text: str) -> "Forest":
        return cls.from_json_obj(json.loads(text))


def forest_from_parents(parents: Iterable[int]) -> Forest:
    """Forest from a 1-based parent list in lexicographic order (0 marks a root)."""
    parents = list(parents)
    k = np.zeros(len(parents), dtype=np.int64)
    for v, p in enumerate(parents):
        if p:
            if not 1 <= p <= v:
                raise PathValidationError("parent must precede its child", v)
            k[p - 1] += 1
    f = Forest(k)
    if [int(p) + 1 for p in f.parent] != parents:
        raise PathValidationError("parent list is not in lexicographic order", 0)
    return f


@dataclass(frozen=True)
class LukasiewiczPath:
    values: np.ndarray
    roots: int = field(init=False)

    def __post_init__(self):
        w = np.array(self.values, dtype=np.int64)
        if w.ndim != 1 or w.size < 2:
            raise PathValidationError("path needs at least two values", 0)
        if w[0] != 0:
            raise PathValidationError("path must start at 0", 0)
        err = _first_passage_error(np.diff(w))
        if err is not None:
            raise PathValidationError(*err)
        w.setflags(write=False)
        object.__setattr__(self, "values", w)
        object.__setattr__(self, "roots", int(-w[-1]))

    def __eq__(self, other):
        return isinstance(other, LukasiewiczPath) and np.array_equal(self.values, other.values)

    def __hash__(self):
        return hash(self.values.tobytes())

    @property
    def n_vertices(self) -> int:
        return int(self.values.size - 1)

    @property
    def jumps(self) -> np.ndarray:
        return np.diff(self.values)

    def to_json(self) -> str:
        return json.dumps([int(v) for v in self.values])

    def to_csv(self) -> str:
        return "".join(f"{int(v)}\n" for v in self.values)


@dataclass(frozen=True)
class HeightProcess:
    values: np.ndarray

    def to_json(self) -> str:
        return json.dumps([int(v) for v in self.values])

    def to_csv(self) -> str:
        return "".join(f"{int(v)}\n" for v in self.values)


def forest_to_lukasiewicz(f: Forest) -> LukasiewiczPath:
    return LukasiewiczPath(np.concatenate(([0], np.cumsum(f.degrees - 1))))


def lukasiewicz_to_forest(w: LukasiewiczPath) -> Forest:
    return Forest(w.jumps + 1)


def height_process(f: Forest) -> HeightProcess:
    return HeightProcess(f.height.copy())


def lr_counts(f: Forest, x: int) -> tuple[int, int, int]:
    """Siblings branching off the strict ancestral line of x, split left/right.

    For each strict ancestor a the line continues through its child c; the
    left count adds rank(c) - 1 and the right count k(a) - rank(c).
    """
    left = right = 0
    c = int(x)
    p = int(f.parent[c])
    while p >= 0:
        r = int(f.rank[c])
        left += r - 1
        right += int(f.degrees[p]) - r
        c, p = p, int(f.parent[p])
    return left, right, left + right


def _jump_mask(w: LukasiewiczPath, values) -> np.ndarray:
    vals = np.fromiter((int(a) for a in values), dtype=np.int64)
    return np.isin(w.jumps, vals)


def lambda_jumps(w: LukasiewiczPath, values, r: float) -> int:
    """Number of jumps with value in ``values`` among the first floor(r) jumps."""
    if not 0 <= r <= w.n_vertices:
        raise ValueError(f"r must lie in [0, {w.n_vertices}]")
    return int(_jump_mask(w, values)[: int(np.floor(r))].sum())


def zeta_jumps(w: LukasiewiczPath, values, p: float) -> int:
    """Smallest number of steps containing ceil(p) jumps with value in ``values``."""
    if p < 1:
        raise ValueError("p must be at least 1")
    hits = np.flatnonzero(_jump_mask(w, values))
    need = int(np.ceil(p))
    if need > hits.size:
        raise ValueError(f"only {hits.size} jumps with the requested values, asked for {need}")
    return int(hits[need - 1]) + 1


def check_sibling_path_identities(f: Forest) -> list[str]:
    """Audit the path identities that tie the children of a vertex to W.

    For every vertex x with children c_1..c_k: W(c_k) = W(x); W(c_j) =
    W(x) + k - j, so W(c_i) - W(c_j) = j - i; and W(c_j) is the minimum of W
    over the window [c_i, c_j]. Returns a list of violations (empty if sound).
    """
    w = forest_to_lukasiewicz(f).values
    out: list[str] = []
    for x in range(f.n_vertices):
        kids = f.children(x)
        if not kids:
            continue
        # the last child sits at the same path level as its parent
        if w[kids[-1]] != w[x]:
            out.append(f"vertex {x}: W(last child)={w[kids[-1]]} != W(x)={w[x]}")
        for a in range(len(kids)):
            y = kids[a]
            for b in range(a + 1, len(kids)):
                z = kids[b]
                # W steps down by one per completed sibling subtree
                if w[z] != w[y] - (b - a):
                    out.append(f"vertex {x}: W({z}) != W({y}) - {b - a}")
                seg_min = int(w[y:z + 1].min())
                if w[z] != seg_min:
                    out.append(f"vertex {x}: W({z}) is not the minimum over [{y}, {z}]")
        # every child sits at a level between W(x) and W(x) + k - 1
        for a, y in enumerate(kids):
            if w[y] != w[x] + len(kids) - 1 - a:
                out.append(f"vertex {x}: W({y}) != W(x) + k - rank")
    return out
