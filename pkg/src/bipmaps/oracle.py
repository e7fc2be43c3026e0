"""Exhaustive enumeration and exact probabilities on small instances.

These are the ground truth for the samplers, the counting formulas and the
multi-point spine inequality. All probabilities are ``fractions.Fraction``.
"""
from __future__ import annotations

import itertools
import math
import time
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterator

import numpy as np
from scipy import stats as sps

from .degrees import DegreeSequence
from .encodings import Forest, lr_counts
from .sampler import (
    LabelBridge,
    LabelledForest,
    reduce_forest,
    sample_forest,
    sample_label_bridge,
    sample_labelled_forest,
)

__all__ = [
    "EnumerationBudget",
    "BudgetExceeded",
    "enumerate_forests",
    "enumerate_label_bridges",
    "enumerate_labelled_forests",
    "uniformity_test",
    "ChiSquareReport",
    "spine_event_probability",
    "spine_bound_exact_check",
    "SpineBoundReport",
    "exact_tail_table",
    "frac_str",
]


class BudgetExceeded(RuntimeError):
    """Enumeration stopped because it would exceed its budget."""


@dataclass(frozen=True)
class EnumerationBudget:
    max_vertices: int = 10
    max_label_space: int = 10**6
    time_limit: float = 600.0  # seconds


def frac_str(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


class _Clock:
    def __init__(self, budget: EnumerationBudget):
        self.budget = budget
        self.t0 = time.monotonic()

    def tick(self):
        if time.monotonic() - self.t0 > self.budget.time_limit:
            raise BudgetExceeded(f"time limit {self.budget.time_limit}s exceeded")


def enumerate_forests(ds: DegreeSequence, budget: EnumerationBudget | None = None) -> Iterator[Forest]:
    """All forests with census ``ds`` in lexicographic order of their degree words."""
    budget = budget or EnumerationBudget()
    if ds.n_vertices > budget.max_vertices:
        raise BudgetExceeded(f"{ds.n_vertices} vertices exceed budget {budget.max_vertices}")
    clock = _Clock(budget)
    rho, n = ds.roots, ds.n_vertices
    keys = [k for k, _ in ds.counts]
    left = [d for _, d in ds.counts]
    word = [0] * n

    def rec(pos: int, level: int):
        if pos == n:
            clock.tick()
            yield Forest(np.array(word, dtype=np.int64))
            return
        for i, k in enumerate(keys):
            if not left[i]:
                continue
            nl = level + k - 1
            # the walk may only reach -rho on the very last step
            if pos < n - 1 and nl <= -rho:
                continue
            left[i] -= 1
            word[pos] = k
            yield from rec(pos + 1, nl)
            left[i] += 1

    yield from rec(0, 0)


def enumerate_label_bridges(k: int) -> Iterator[LabelBridge]:
    """All bridges of length k ending at 0 with steps >= -1, from gap compositions."""
    if k < 1:
        raise ValueError("k must be at least 1")
    for bars in itertools.combinations(range(2 * k - 1), k - 1):
        parts, prev = [], -1
        for b in bars + (2 * k - 1,):
            parts.append(b - prev - 1)
            prev = b
        yield LabelBridge(tuple(np.cumsum(np.asarray(parts) - 1)))


def enumerate_labelled_forests(
    ds: DegreeSequence, budget: EnumerationBudget | None = None
) -> Iterator[LabelledForest]:
    budget = budget or EnumerationBudget()
    space = math.comb(2 * ds.roots - 1, ds.roots - 1)
    for k, d in ds.counts:
        if k:
            space *= math.comb(2 * k - 1, k - 1) ** d
    if space > budget.max_label_space:
        raise BudgetExceeded(f"label space {space} exceeds {budget.max_label_space}")
    bridges = {k: [b.values for b in enumerate_label_bridges(k)] for k, _ in ds.counts if k}
    bridges.setdefault(ds.roots, [b.values for b in enumerate_label_bridges(ds.roots)])
    for f in enumerate_forests(ds, budget):
        internal = [x for x in range(f.n_vertices) if f.degrees[x]]
        roots = [int(r) for r in f.tree_roots()]
        kids = {x: f.children(x) for x in internal}
        choice_sets = [bridges[ds.roots]] + [bridges[int(f.degrees[x])] for x in internal]
        for combo in itertools.product(*choice_sets):
            lab = np.zeros(f.n_vertices, dtype=np.int64)
            for r, b in zip(roots, combo[0]):
                lab[r] = b
            for x, br in zip(internal, combo[1:]):
                for c, b in zip(kids[x], br):
                    lab[c] = lab[x] + b
            yield LabelledForest(f, lab)


# -- uniformity -------------------------------------------------------------

@dataclass
class ChiSquareReport:
    sampler: str
    trials: int
    outcomes: int
    statistic: float
    dof: int
    p_value: float
    unseen: int

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def _biased_forest(ds, rng):
    # keep the lexicographically smaller of two uniform draws
    a, b = sample_forest(ds, rng), sample_forest(ds, rng)
    return a if tuple(a.degrees) <= tuple(b.degrees) else b


def _biased_bridge(k, rng):
    a, b = sample_label_bridge(k, rng), sample_label_bridge(k, rng)
    return min(a, b, key=lambda x: x.values)


def uniformity_test(sampler_id: str, target, trials: int, rng: np.random.Generator) -> ChiSquareReport:
    """Chi-square goodness of fit of a sampler against its enumerated support.

    ``sampler_id`` is one of forest, labelled-forest, label-bridge, and the
    planted-bias controls biased-forest and biased-label-bridge. ``target`` is
    a DegreeSequence for forest samplers and an integer k for bridges.
    """
    if sampler_id in ("forest", "biased-forest"):
        support = [tuple(f.degrees) for f in enumerate_forests(target)]
        draw = sample_forest if sampler_id == "forest" else _biased_forest
        key = lambda rng: tuple(draw(target, rng).degrees)
    elif sampler_id == "labelled-forest":
        support = [tuple(lf.forest.degrees) + tuple(lf.labels) for lf in enumerate_labelled_forests(target)]
        key = lambda rng: (lambda lf: tuple(lf.forest.degrees) + tuple(lf.labels))(
            sample_labelled_forest(target, rng))
    elif sampler_id in ("label-bridge", "biased-label-bridge"):
        support = [b.values for b in enumerate_label_bridges(int(target))]
        draw = sample_label_bridge if sampler_id == "label-bridge" else _biased_bridge
        key = lambda rng: draw(int(target), rng).values
    else:
        raise ValueError(f"unknown sampler {sampler_id!r}")
    index = {s: i for i, s in enumerate(support)}
    counts = np.zeros(len(support), dtype=np.int64)
    for _ in range(trials):
        counts[index[key(rng)]] += 1
    if len(support) == 1:
        stat, p = 0.0, 1.0
    else:
        stat, p = sps.chisquare(counts)
    return ChiSquareReport(sampler_id, trials, len(support), float(stat), len(support) - 1,
                           float(p), int(np.sum(counts == 0)))


# -- multi-point spine bound ------------------------------------------------

def spine_event_probability(ds: DegreeSequence, pairs) -> Fraction:
    """Exact probability that the first h urn draws and ranks equal ``pairs``."""
    remaining = {k: k * d for k, d in ds.counts if k >= 1}
    total = ds.n_edges
    p = Fraction(1)
    for k, j in pairs:
        if not 1 <= j <= k or remaining.get(k, 0) == 0 or total == 0:
            return Fraction(0)
        p *= Fraction(remaining[k], total * k)
        remaining[k] -= 1
        total -= 1
    return p


def spine_event_probability_closed(ds: DegreeSequence, pairs) -> Fraction:
    """Same probability from the falling-factorial product formula."""
    h = len(pairs)
    eps = ds.n_edges
    if h > eps or any(not 1 <= j <= k for k, j in pairs):
        return Fraction(0)
    m = Counter(k for k, _ in pairs)
    val = Fraction(math.factorial(eps - h), math.factorial(eps))
    for l, ml in m.items():
        balls = l * ds.d(l)
        if ml > balls:
            return Fraction(0)
        val *= Fraction(math.factorial(balls), math.factorial(balls - ml) * l**ml)
    return val


@dataclass
class SpineBoundEntry:
    q: int
    content: tuple
    branch_points: int
    trees: int
    lhs: Fraction
    rhs: float
    in_hypothesis: bool
    holds: bool

    def to_dict(self) -> dict:
        return {
            "q": self.q,
            "content": [list(p) for p in self.content],
            "b": self.branch_points,
            "c": self.trees,
            "lhs": frac_str(self.lhs),
            "rhs": self.rhs,
            "in_hypothesis": self.in_hypothesis,
            "holds": self.holds,
        }


@dataclass
class SpineBoundReport:
    ds: DegreeSequence
    q: int
    entries: list[SpineBoundEntry] = field(default_factory=list)

    @property
    def violations(self) -> list[SpineBoundEntry]:
        return [e for e in self.entries if e.in_hypothesis and not e.holds]

    @property
    def skipped(self) -> list[SpineBoundEntry]:
        return [e for e in self.entries if not e.in_hypothesis]

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {
            "degrees": self.ds.to_json_obj(),
            "q": self.q,
            "checked": len(self.entries) - len(self.skipped),
            "skipped": len(self.skipped),
            "violations": [e.to_dict() for e in self.violations],
        }


def _bound_holds(lhs: Fraction, coef: Fraction, sigma2: int, power: int) -> bool:
    """Exact test of lhs <= coef * sigma2**(power/2) for power >= 0."""
    base = coef * Fraction(sigma2) ** (power // 2)
    if power % 2 == 0:
        return lhs <= base
    # lhs <= base * sqrt(sigma2)  <=>  lhs^2 <= base^2 * sigma2 (both sides non-negative)
    return lhs * lhs <= base * base * sigma2


def spine_bound_rhs(ds: DegreeSequence, q: int, content, b: int, c: int) -> tuple[Fraction, int]:
    """Right-hand side as (rational coefficient, power of sigma)."""
    v, rho, delta = ds.n_vertices, ds.roots, ds.max_degree
    extra = rho + (q - 1) * delta + sum(k - 1 for k, _ in content)
    coef = Fraction(q * q * 2 ** (q - 1)) * Fraction(1, v ** (q + b)) * Fraction(rho) ** (c - 1)
    coef *= extra * spine_event_probability(ds, content)
    return coef, q + b - c


def spine_bound_exact_check(ds: DegreeSequence, q: int, budget: EnumerationBudget | None = None) -> SpineBoundReport:
    """Exact comparison of the multi-point content probability with its spine bound.

    The left side is the probability, over a uniform forest and q independent
    uniform vertices, that the reduced forest has q leaves, c trees, b branch
    points and the given content. Every observed (content, b, c) is compared.
    With q >= 2 the bound assumes h, q <= n/4; configurations outside that
    range are reported as skipped.
    """
    if ds.max_degree < 2:
        raise ValueError("the spine bound needs a vertex with at least two children")
    forests = list(enumerate_forests(ds, budget))
    v = ds.n_vertices
    weight = Fraction(1, len(forests) * v**q)
    tally: Counter = Counter()
    for f in forests:
        for xs in itertools.product(range(v), repeat=q):
            red = reduce_forest(f, xs)
            if red.leaves != q:
                continue
            tally[(red.content.pairs, red.branch_points, red.trees)] += 1
    report = SpineBoundReport(ds, q)
    sigma2 = ds.global_variance
    for (content, b, c), cnt in sorted(tally.items()):
        lhs = cnt * weight
        coef, power = spine_bound_rhs(ds, q, content, b, c)
        hyp = q == 1 or (4 * len(content) <= v and 4 * q <= v)
        holds = _bound_holds(lhs, coef, sigma2, power)
        rhs = float(coef) * math.sqrt(sigma2) ** power
        report.entries.append(SpineBoundEntry(q, content, b, c, lhs, rhs, hyp, holds))
    return report


# -- exact tails --------------------------------------------------------------

def _vertex_functional(name: str) -> Callable[[Forest, int], int]:
    if name == "lr":
        return lambda f, x: lr_counts(f, x)[2]
    if name == "height":
        return lambda f, x: int(f.height[x])
    if name == "r":
        return lambda f, x: lr_counts(f, x)[1]
    raise KeyError(name)


def exact_tail_table(ds: DegreeSequence, functional: str,
                     budget: EnumerationBudget | None = None) -> dict[int, Fraction]:
    """Exact law of a functional under the uniform forest (and a uniform vertex).

    Vertex functionals: lr, r, height. Forest functionals: width, max-height.
    """
    forests = list(enumerate_forests(ds, budget))
    law: Counter = Counter()
    if functional in ("width", "max-height"):
        for f in forests:
            law[f.width() if functional == "width" else f.max_height()] += 1
        total = len(forests)
    else:
        fn = _vertex_functional(functional)
        for f in forests:
            for x in range(f.n_vertices):
                law[fn(f, x)] += 1
        total = len(forests) * ds.n_vertices
    return {k: Fraction(c, total) for k, c in sorted(law.items())}


def exact_exceedance(law: dict[int, Fraction], threshold: float) -> Fraction:
    """P(value >= threshold) from an exact law."""
    return sum((p for v, p in law.items() if v >= threshold), Fraction(0))
