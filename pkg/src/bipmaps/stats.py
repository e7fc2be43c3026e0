"""Monte Carlo checks of the explicit tail bounds and the scaling diagnostics.

Each replica gets its own generator ``default_rng(SeedSequence(seed,
spawn_key=(i,)))``, so results do not depend on how replicas are spread over
worker processes.
"""
from __future__ import annotations

import csv
import io
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import integrate, special
from scipy import stats as sps

from . import _kernels
from .bijection import PointedMap, bfs_distances, double_sweep_diameter, forest_to_map
from .degrees import DegreeSequence, face_to_forest_degrees, family_generator
from .encodings import Forest, forest_to_lukasiewicz, lr_counts
from .sampler import LabelledForest, sample_forest, sample_labelled_forest, sample_spine

__all__ = [
    "replica_rng",
    "run_replicas",
    "wilson_interval",
    "TailCheckReport",
    "check_bridge_min_tail",
    "check_luka_increment_moment",
    "moment_constant",
    "check_lr_tail",
    "check_width_tail",
    "check_typical_height_tail",
    "check_lambda_zeta",
    "check_en_event",
    "check_spine_mean",
    "d_g_functional",
    "check_distance_bound",
    "holder_moment_scan",
    "distance_profile",
    "scaling_table",
    "RescaledProcess",
    "rescaled_label_process",
]

CONFIDENCE = 0.99


# -- replicas ----------------------------------------------------------------

def replica_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(entropy=int(seed), spawn_key=(int(index),)))


def _run_chunk(fn, seed, lo, hi, args):
    return [fn(replica_rng(seed, i), *args) for i in range(lo, hi)]


def run_replicas(fn: Callable, replicas: int, seed: int, jobs: int = 1, args: tuple = ()) -> list:
    """Evaluate ``fn(rng, *args)`` for replica indices 0..replicas-1, in index order."""
    jobs = max(1, int(jobs))
    if jobs == 1 or replicas < 2 * jobs:
        return _run_chunk(fn, seed, 0, replicas, args)
    edges = np.linspace(0, replicas, 4 * jobs + 1).astype(int)
    out: list = []
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        futs = [pool.submit(_run_chunk, fn, seed, int(a), int(b), args)
                for a, b in zip(edges[:-1], edges[1:]) if b > a]
        for f in futs:
            out.extend(f.result())
    return out


def default_jobs() -> int:
    return os.cpu_count() or 1


# -- reports -----------------------------------------------------------------

def wilson_interval(k: int, n: int, confidence: float = CONFIDENCE) -> tuple[float, float]:
    """One-sided Wilson limits: each side excludes mass 1 - confidence."""
    if n == 0:
        return 0.0, 1.0
    z = float(sps.norm.ppf(confidence))
    p = k / n
    den = 1 + z * z / n
    mid = p + z * z / (2 * n)
    half = z * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n))
    return max(0.0, (mid - half) / den), min(1.0, (mid + half) / den)


@dataclass
class TailCheckReport:
    """Exceedance frequencies against a bound, one row per threshold.

    A row passes when the lower confidence limit does not exceed the bound;
    rows outside the stated range of the bound are marked SKIP.
    """

    name: str
    replicas: int
    z: list[float]
    hits: list[int]
    trials: list[int]
    bound: list[float]
    in_range: list[bool]
    extra: dict = field(default_factory=dict)

    @property
    def empirical(self) -> list[float]:
        return [h / t if t else 0.0 for h, t in zip(self.hits, self.trials)]

    @property
    def intervals(self) -> list[tuple[float, float]]:
        return [wilson_interval(h, t) for h, t in zip(self.hits, self.trials)]

    @property
    def verdicts(self) -> list[str]:
        out = []
        for (lo, _), b, ok in zip(self.intervals, self.bound, self.in_range):
            out.append("SKIP" if not ok else ("PASS" if lo <= b else "FAIL"))
        return out

    @property
    def ok(self) -> bool:
        return "FAIL" not in self.verdicts

    def rows(self) -> list[dict]:
        return [
            {"z": z, "empirical": e, "ci_low": lo, "ci_high": hi, "bound": b, "verdict": v}
            for z, e, (lo, hi), b, v in zip(self.z, self.empirical, self.intervals, self.bound, self.verdicts)
        ]

    def to_dict(self) -> dict:
        return {"name": self.name, "replicas": self.replicas, "ok": self.ok,
                "rows": self.rows(), "extra": self.extra}

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=["z", "empirical", "ci_low", "ci_high", "bound", "verdict"],
                           lineterminator="\n")
        w.writeheader()
        for r in self.rows():
            w.writerow(r)
        return buf.getvalue()


def _report(name, values, z_grid, event, bound, in_range, replicas, extra=None, trials=None):
    values = np.asarray(values)
    hits = [int(np.sum(event(values, z))) for z in z_grid]
    tr = [int(values.size if trials is None else trials)] * len(z_grid)
    return TailCheckReport(name, replicas, [float(z) for z in z_grid], hits, tr,
                           [float(bound(z)) for z in z_grid], [bool(in_range(z)) for z in z_grid],
                           extra or {})


def _log_slope(z_grid, probs):
    """Least-squares slope and R^2 of log probability against z over positive entries."""
    z = np.asarray(z_grid, dtype=float)
    p = np.asarray(probs, dtype=float)
    keep = p > 0
    if keep.sum() < 2:
        return float("nan"), float("nan"), int(keep.sum())
    res = sps.linregress(z[keep], np.log(p[keep]))
    return float(res.slope), float(res.rvalue**2), int(keep.sum())


# -- bridge minimum ----------------------------------------------------------

def _bridge_min(rng, jumps, k, rho, alpha):
    b = np.cumsum(rng.permutation(jumps)[:k])
    return min(0, int(b.min())) + alpha * rho if k else alpha * rho


def check_bridge_min_tail(ds: DegreeSequence, alpha: float, z_grid: Sequence[float], replicas: int,
                          seed: int, jobs: int = 1) -> TailCheckReport:
    """P(min over i <= alpha*n of B(i) + alpha*rho <= -sigma*z) against its exponential bound."""
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie in (0, 1)")
    sigma = ds.sigma
    k = int(math.floor(alpha * ds.n_vertices))
    vals = run_replicas(_bridge_min, replicas, seed, jobs, (ds.jumps(), k, ds.roots, alpha))
    bound = lambda z: math.exp(-((1 - alpha) ** 3) * sigma * z * z / (2 * alpha * sigma + z))
    return _report("bridge-min", vals, z_grid, lambda v, z: v <= -sigma * z, bound,
                   lambda z: z >= 0, replicas, {"alpha": alpha, "sigma": sigma, "window": k})


# -- increments of the path ---------------------------------------------------

def moment_constant(p: int, delta: float) -> dict:
    """Constant C(p) in E[(W(ns) - min W)^p] <= C(p) (sigma + rho)^p |t - s|^(p/2).

    From the sub-Gaussian tail with a = 16(2 + 1/delta): the tail integral
    c(p) = int_0^inf 2 exp(-z^(2/p)/a) dz = 2 a^(p/2) Gamma(p/2 + 1), and
    C(p) = 2^(p-1) (1 + c(p)). Returns the closed form and the quadrature.
    """
    a = 16 * (2 + 1 / delta)
    closed = 2 * a ** (p / 2) * special.gamma(p / 2 + 1)
    quad, err = integrate.quad(lambda z: 2 * math.exp(-(z ** (2 / p)) / a), 0, np.inf, limit=200)
    return {"c": closed, "c_quad": quad, "quad_error": err, "C": 2 ** (p - 1) * (1 + closed)}


def _increment_stats(rng, ds, pairs):
    w = forest_to_lukasiewicz(sample_forest(ds, rng)).values
    # time index of the forest read as one tree: one extra 0 step in front
    wp = np.concatenate(([0], w))
    n = ds.n_vertices
    out = []
    for s, t in pairs:
        i, j = int(math.floor(n * s)), int(math.floor(n * t))
        out.append(float(wp[i] - wp[i:j + 1].min()))
    return out


def check_luka_increment_moment(ds: DegreeSequence, delta: float, pairs: Sequence[tuple[float, float]],
                                x_grid: Sequence[float], replicas: int, seed: int,
                                jobs: int = 1, moment_p: int = 2) -> list[TailCheckReport]:
    """Sub-Gaussian tail of W(ns) - min over [s, t] of W, one report per (s, t)."""
    if not 0 < delta <= 1 or ds.d(1) > (1 - delta) * ds.n_edges:
        raise ValueError(f"delta={delta} infeasible: need d(1) <= (1 - delta) * edges")
    for s, t in pairs:
        if not (0 <= s < t <= 1 and t - s <= 0.5):
            raise ValueError("need 0 <= s < t <= 1 with t - s <= 1/2")
    vals = np.asarray(run_replicas(_increment_stats, replicas, seed, jobs, (ds, list(pairs))))
    sigma, rho = ds.sigma, ds.roots
    a = 16 * (2 + 1 / delta)
    const = moment_constant(moment_p, delta)
    reports = []
    for col, (s, t) in enumerate(pairs):
        gap = t - s
        v = vals[:, col]
        moment = float(np.mean(v**moment_p))
        limit = const["C"] * (sigma + rho) ** moment_p * gap ** (moment_p / 2)
        extra = {"s": s, "t": t, "delta": delta, "moment_p": moment_p, "moment": moment,
                 "moment_bound": limit, "moment_ok": bool(moment <= limit), "constant": const}
        rep = _report("increment-tail", v, x_grid,
                      lambda v, x, g=gap: v - rho * g > sigma * math.sqrt(g) * x,
                      lambda x: 2 * math.exp(-x * x / a), lambda x: x > 0, replicas, extra)
        reports.append(rep)
    return reports


# -- branching counts ---------------------------------------------------------

def _lr_uniform(rng, ds):
    f = sample_forest(ds, rng)
    return lr_counts(f, int(rng.integers(f.n_vertices)))[2]


def check_lr_tail(ds: DegreeSequence, z_grid: Sequence[float], replicas: int, seed: int,
                  jobs: int = 1) -> TailCheckReport:
    """P(LR(uniform vertex) >= z sigma) against 4 exp(-z/288), valid for z >= 1/2."""
    if ds.max_degree < 2:
        raise ValueError("need a vertex with at least two children")
    sigma = ds.sigma
    vals = run_replicas(_lr_uniform, replicas, seed, jobs, (ds,))
    rep = _report("lr-tail", vals, z_grid, lambda v, z: v >= z * sigma,
                  lambda z: 4 * math.exp(-z / 288), lambda z: z >= 0.5, replicas, {"sigma": sigma})
    slope, r2, used = _log_slope(rep.z, rep.empirical)
    rep.extra.update({"empirical_log_slope": slope, "r2": r2, "points": used})
    return rep


def _width_height(rng, ds):
    f = sample_forest(ds, rng)
    return f.width(), f.max_height()


def check_width_tail(ds: DegreeSequence, z_grid: Sequence[float], replicas: int, seed: int,
                     jobs: int = 1, height_grid: Sequence[float] | None = None) -> TailCheckReport:
    """P(width >= z sigma) against 3 exp(-z/48) for z >= 1, single trees only.

    ``extra`` carries the companion check P(height <= edges/(z sigma)) with the
    same bound, and the log-linear decay of P(height >= z sigma).
    """
    if ds.roots != 1:
        raise ValueError("the width bound is stated for a single tree")
    if ds.max_degree < 2:
        raise ValueError("need a vertex with at least two children")
    sigma, eps = ds.sigma, ds.n_edges
    wh = np.asarray(run_replicas(_width_height, replicas, seed, jobs, (ds,)))
    width, height = wh[:, 0], wh[:, 1]
    bound = lambda z: 3 * math.exp(-z / 48)
    rep = _report("width-tail", width, z_grid, lambda v, z: v >= z * sigma, bound,
                  lambda z: z >= 1, replicas, {"sigma": sigma})
    low = _report("short-height", height, z_grid, lambda v, z: v <= eps / (z * sigma), bound,
                  lambda z: z >= 1, replicas)
    rep.extra["short_height"] = low.to_dict()
    hg = list(height_grid or [0.5, 1.0, 1.5, 2.0, 2.5, 3.0])
    hp = [float(np.mean(height >= z * sigma)) for z in hg]
    slope, r2, used = _log_slope(hg, hp)
    rep.extra["height_tail"] = {"z": hg, "empirical": hp, "log_slope": slope, "r2": r2,
                                "points": used, "decreasing": bool(slope < 0)}
    rep.extra["short_height_ok"] = low.ok
    return rep


def _height_exceed(rng, ds, thresholds):
    f = sample_forest(ds, rng)
    h = f.height
    return [float(np.mean(h >= t)) for t in thresholds]


def check_typical_height_tail(ds: DegreeSequence, z_grid: Sequence[float], replicas: int, seed: int,
                              jobs: int = 1, min_r2: float = 0.9) -> dict:
    """Log-linear decay of P(|x| >= z edges/sigma) for a uniform vertex x.

    Each replica averages the indicator over all vertices of one forest.
    Thresholds with zero observed exceedance are left out of the fit.
    """
    if ds.max_degree < 2:
        raise ValueError("need a vertex with at least two children")
    scale = ds.n_edges / ds.sigma
    thr = [z * scale for z in z_grid]
    probs = np.mean(np.asarray(run_replicas(_height_exceed, replicas, seed, jobs, (ds, thr))), axis=0)
    slope, r2, used = _log_slope(z_grid, probs)
    ok = bool(used >= 3 and slope < 0 and r2 >= min_r2)
    return {"name": "typical-height", "z": list(map(float, z_grid)), "empirical": probs.tolist(),
            "scale": scale, "log_slope": slope, "r2": r2, "points": used, "ok": ok}


# -- jump counting ------------------------------------------------------------

def _lambda_dev(rng, ds, values):
    f = sample_forest(ds, rng)
    jumps = f.degrees - 1
    mask = np.isin(jumps, values)
    lam = np.concatenate(([0], np.cumsum(mask)))
    n, total = jumps.size, int(mask.sum())
    j = np.arange(n + 1)
    # Lambda(n t) is a step function: on [j/n, (j+1)/n) it equals lam[j]
    dev = max(np.max(np.abs(lam / total - j / n)), np.max(np.abs(lam[:-1] / total - j[1:] / n)))
    # zeta(p) = first step count with p hits; check it inverts Lambda
    hits = np.flatnonzero(mask) + 1
    inverse_ok = bool(np.all(lam[hits] == np.arange(1, total + 1)) and np.all(lam[hits - 1] < np.arange(1, total + 1)))
    return float(dev), inverse_ok


def check_lambda_zeta(ds: DegreeSequence, values, replicas: int, seed: int, jobs: int = 1) -> dict:
    """Uniform deviation of the rescaled jump counter Lambda_A from the identity."""
    values = sorted(int(a) for a in values)
    total = sum(d for k, d in ds.counts if k - 1 in values)
    if total == 0:
        raise ValueError("no jumps with the requested values")
    res = run_replicas(_lambda_dev, replicas, seed, jobs, (ds, np.asarray(values)))
    dev = np.array([r[0] for r in res])
    return {"name": "lambda-zeta", "values": values, "hits": total, "replicas": replicas,
            "median": float(np.median(dev)), "q10": float(np.quantile(dev, 0.1)),
            "q90": float(np.quantile(dev, 0.9)), "inverse_ok": all(r[1] for r in res)}


# -- first-child event ----------------------------------------------------------

def first_child_threshold(ds: DegreeSequence) -> tuple[float, float]:
    """(c, l): the share cap c = 1 - d0/(2n) and the length cutoff l."""
    n, d0 = ds.n_vertices, ds.n_leaves
    return 1 - d0 / (2 * n), (4 * n / d0) ** 2 * math.log(4 * n**3 / d0)


def first_child_event(f: Forest, ds: DegreeSequence, cutoff: float | None = None) -> bool:
    """No ancestral segment longer than the cutoff is mostly made of first children."""
    cut = first_child_threshold(ds)[1] if cutoff is None else cutoff
    n, d0 = ds.n_vertices, ds.n_leaves
    return bool(_kernels.first_child_event(f.degrees, f.parent, f.rank, f.height, 2 * n, 2 * n - d0, float(cut)))


def first_child_event_bruteforce(f: Forest, ds: DegreeSequence, cutoff: float | None = None) -> bool:
    c, cut = first_child_threshold(ds)
    cut = cut if cutoff is None else cutoff
    for y in range(f.n_vertices):
        line = f.ancestors(y) + [y]
        for i in range(len(line) - 1):
            seg = line[i + 1:]
            if len(seg) > cut and sum(1 for z in seg if f.rank[z] == 1) > c * len(seg):
                return False
    return True


def _en(rng, ds):
    f = sample_forest(ds, rng)
    return first_child_event(f, ds), f.max_height()


def check_en_event(ds: DegreeSequence, replicas: int, seed: int, jobs: int = 1) -> dict:
    if ds.n_leaves < 1:
        raise ValueError("need at least one leaf")
    c, cut = first_child_threshold(ds)
    res = run_replicas(_en, replicas, seed, jobs, (ds,))
    hits = sum(1 for r in res if r[0])
    lo, hi = wilson_interval(hits, replicas)
    return {"name": "first-child-event", "replicas": replicas, "frequency": hits / replicas,
            "ci_low": lo, "ci_high": hi, "share_cap": c, "length_cutoff": cut,
            "max_height_seen": int(max(r[1] for r in res))}


# -- spine urn ---------------------------------------------------------------

def _spine_last(rng, ds, h):
    return int(sample_spine(ds, h, rng).xi[-1])


def check_spine_mean(ds: DegreeSequence, draws: int, seed: int, h: int | None = None, jobs: int = 1) -> dict:
    """Mean of xi(h) - 1 over independent urns against sigma^2/edges.

    Tolerance 3 sqrt(max_degree sigma^2 / edges) / sqrt(draws), from the
    variance bound of a size-biased pick.
    """
    eps = ds.n_edges
    h = min(eps, 16) if h is None else h
    vals = np.asarray(run_replicas(_spine_last, draws, seed, jobs, (ds, h))) - 1
    target = ds.global_variance / eps
    tol = 3 * math.sqrt(ds.max_degree * ds.global_variance / eps) / math.sqrt(draws)
    mean = float(vals.mean())
    return {"name": "spine-mean", "draws": draws, "index": h, "mean": mean, "target": target,
            "tolerance": tol, "ok": abs(mean - target) <= tol}


# -- path functionals on maps ---------------------------------------------------

def d_g_functional(g, s: float, t: float) -> float:
    """g(s) + g(t) - 2 max(min over [s, t], min over [0, s] and [t, 1]) for a
    piecewise-linear g given by its values on a uniform grid of [0, 1]."""
    g = np.asarray(g, dtype=float)
    if g.size < 2:
        raise ValueError("need at least two grid values")
    if not (0 <= s <= 1 and 0 <= t <= 1):
        raise ValueError("s and t must lie in [0, 1]")
    if s > t:
        s, t = t, s
    grid = np.linspace(0, 1, g.size)
    gs, gt = np.interp(s, grid, g), np.interp(t, grid, g)
    inner_pts = g[(grid > s) & (grid < t)]
    inner = min(gs, gt, inner_pts.min() if inner_pts.size else np.inf)
    outer_pts = g[(grid < s) | (grid > t)]
    outer = min(gs, gt, outer_pts.min() if outer_pts.size else np.inf)
    return float(gs + gt - 2 * max(inner, outer))


def _leaf_images(lf: LabelledForest, pm: PointedMap) -> np.ndarray:
    """Map vertex hit by each tree-indexed time 0..n (time 0 is the extra root)."""
    f = lf.forest
    phi = _kernels.rightmost_leaf(f.degrees, f.last_child)
    vid = np.empty(f.n_vertices, dtype=np.int64)
    vid[pm.leaf_of_vertex] = np.arange(pm.leaf_of_vertex.size)
    img = vid[phi]
    last_root = int(f.tree_roots()[-1])
    return np.concatenate(([img[last_root]], img))


@dataclass
class DistanceBoundReport:
    pairs: int
    violations: int
    worst_slack: int  # min over pairs of D_L + 2 - d

    @property
    def ok(self) -> bool:
        return self.violations == 0


def check_distance_bound(lf: LabelledForest, pm: PointedMap, pairs, rng: np.random.Generator | None = None,
                         dist: np.ndarray | None = None) -> DistanceBoundReport:
    """Graph distance between leaf images of times i, j against D_L(i, j) + 2.

    ``pairs`` is either an (m, 2) integer array of tree-indexed times or a
    count of uniform pairs drawn with ``rng``.
    """
    L = lf.label_process()
    n1 = L.size
    if np.isscalar(pairs):
        ij = rng.integers(n1, size=(int(pairs), 2))
    else:
        ij = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
    ii, jj = np.minimum(ij[:, 0], ij[:, 1]), np.maximum(ij[:, 0], ij[:, 1])
    pre = np.minimum.accumulate(L)
    suf = np.minimum.accumulate(L[::-1])[::-1]
    dl = _kernels.dl_batch(L, pre, suf, ii, jj)
    img = _leaf_images(lf, pm)
    a, b = img[ii], img[jj]
    if dist is not None:
        d = dist[a, b]
    else:
        d = np.empty(a.size, dtype=np.int64)
        order = np.argsort(a, kind="stable")
        srcs = np.unique(a)
        rows = {int(s): bfs_distances(pm.map, int(s)) for s in srcs}
        for q in order:
            d[q] = rows[int(a[q])][b[q]]
    slack = dl + 2 - d
    return DistanceBoundReport(int(a.size), int(np.sum(slack < 0)), int(slack.min()) if slack.size else 0)


# -- label-process regularity ---------------------------------------------------

@dataclass
class RescaledProcess:
    times: np.ndarray
    values: np.ndarray


def rescaled_label_process(lf: LabelledForest, ds: DegreeSequence) -> RescaledProcess:
    """Labels (extra root first) over [0, 1], divided by (sigma + rho)^(1/2)."""
    L = lf.label_process().astype(float)
    return RescaledProcess(np.linspace(0, 1, L.size), L / math.sqrt(ds.sigma + ds.roots))


def _holder_moments(rng, ds, q, lags):
    L = sample_labelled_forest(ds, rng).label_process().astype(float)
    L /= math.sqrt(ds.sigma + ds.roots)
    return [float(np.mean(np.abs(L[m:] - L[:-m]) ** q)) for m in lags]


def holder_moment_scan(ds: DegreeSequence, q: int, gaps: Sequence[float], replicas: int, seed: int,
                       jobs: int = 1, batches: int = 10) -> dict:
    """Slope of log E|L(s + g) - L(s)|^q against log g for the rescaled label process.

    Moments average over all start times and replicas. The slope uncertainty
    is the spread of slopes fitted on ``batches`` disjoint replica batches.
    """
    if q not in (2, 4, 6, 8):
        raise ValueError("q must be an even integer up to 8")
    if ds.degree_one_slack() <= 0:
        raise ValueError("all edges come from one-child vertices; the scan assumes d(1)/edges < 1")
    n = ds.n_vertices + 1
    lags = sorted({max(1, int(round(g * (n - 1)))) for g in gaps})
    lags = [m for m in lags if m < n]
    mom = np.asarray(run_replicas(_holder_moments, replicas, seed, jobs, (ds, q, lags)))
    x = np.log(np.asarray(lags) / (n - 1))
    mean = mom.mean(axis=0)
    fit = sps.linregress(x, np.log(mean))
    slopes = []
    for part in np.array_split(np.arange(replicas), max(1, min(batches, replicas))):
        if part.size:
            slopes.append(sps.linregress(x, np.log(mom[part].mean(axis=0))).slope)
    slopes = np.asarray(slopes)
    se = float(slopes.std(ddof=1) / math.sqrt(slopes.size)) if slopes.size > 1 else float("nan")
    return {"name": "holder-scan", "q": q, "replicas": replicas, "gaps": (np.asarray(lags) / (n - 1)).tolist(),
            "moments": mean.tolist(), "slope": float(fit.slope), "slope_se": se,
            "band": [float(fit.slope - 2 * se), float(fit.slope + 2 * se)], "r2": float(fit.rvalue**2)}


# -- map distances ------------------------------------------------------------

@dataclass
class DistanceProfile:
    scale: float
    two_point: np.ndarray  # rescaled distances between uniform non-pointed vertices
    diameter_lb: int

    @property
    def rescaled_diameter(self) -> float:
        return self.diameter_lb / self.scale

    def quantiles(self, qs=(0.1, 0.5, 0.9)) -> list[float]:
        return [float(np.quantile(self.two_point, q)) for q in qs]


def distance_profile(pm: PointedMap, samples: int, rng: np.random.Generator, scale: float = 1.0,
                     sources: int = 8, sweeps: int = 4) -> DistanceProfile:
    """Rescaled two-point distances and a double-sweep diameter lower bound."""
    m = pm.map
    others = np.setdiff1d(np.arange(m.n_vertices), [pm.star])
    if others.size == 0:
        return DistanceProfile(scale, np.zeros(0), 0)
    src = rng.choice(others, size=min(sources, samples), replace=True)
    per = int(math.ceil(samples / src.size))
    out = []
    for s in src:
        d = bfs_distances(m, int(s))
        out.append(d[rng.choice(others, size=per)])
    two = np.concatenate(out)[:samples] / scale
    return DistanceProfile(scale, two, double_sweep_diameter(m, rng, sweeps))


def _scaling_one(rng, fds, ds, scale, pairs):
    pm = forest_to_map(sample_labelled_forest(ds, rng))
    prof = distance_profile(pm, pairs, rng, scale)
    return prof.rescaled_diameter, prof.two_point


def scaling_table(family: str, sizes: Sequence[int], params: dict, replicas: int, seed: int,
                  jobs: int = 1, pairs: int = 200, ladder: bool = False,
                  holder_replicas: int = 0) -> list[dict]:
    """Per-size rescaled diameters and two-point distances.

    Distances are divided by (sigma + rho)^(1/2); with ``ladder`` the face
    half-degree follows p(n) = floor(n^(1/4)) and the scale is (p(p-1)n)^(1/4).
    """
    rows = []
    for idx, n in enumerate(sizes):
        prm = dict(params)
        if ladder:
            prm["p"] = max(2, int(math.floor(n ** 0.25)))
        fds = family_generator(family, n, prm)
        ds = face_to_forest_degrees(fds)
        if ladder:
            p = prm["p"]
            scale = (p * (p - 1) * n) ** 0.25
        else:
            scale = math.sqrt(ds.sigma + ds.roots)
        res = run_replicas(_scaling_one, replicas, seed + 7919 * idx, jobs, (fds, ds, scale, pairs))
        diam = np.array([r[0] for r in res])
        two = np.concatenate([r[1] for r in res])
        row = {"n": n, "p": prm.get("p"), "sigma": ds.sigma, "rho": ds.roots, "scale": scale,
               "diameter_median": float(np.median(diam)), "diameter_q10": float(np.quantile(diam, 0.1)),
               "diameter_q90": float(np.quantile(diam, 0.9)),
               "two_point_q10": float(np.quantile(two, 0.1)), "two_point_median": float(np.median(two)),
               "two_point_q90": float(np.quantile(two, 0.9))}
        if holder_replicas:
            hs = holder_moment_scan(ds, 8, [2.0**-e for e in range(2, 10)], holder_replicas,
                                    seed + 104729 * idx, jobs)
            row["holder_slope"] = hs["slope"]
        rows.append(row)
    return rows


def within_factor(values: Sequence[float], factor: float = 2.0) -> bool:
    v = np.asarray(values, dtype=float)
    return bool(v.min() > 0 and v.max() <= factor * v.min())
