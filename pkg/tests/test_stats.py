import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bipmaps.bijection import all_pairs_distances, forest_to_map
from bipmaps.degrees import DegreeSequence, face_to_forest_degrees, family_generator
from bipmaps.oracle import enumerate_labelled_forests
from bipmaps.sampler import label_forest, sample_labelled_forest
from bipmaps.stats import (
    TailCheckReport,
    check_bridge_min_tail,
    check_distance_bound,
    check_en_event,
    check_lambda_zeta,
    check_lr_tail,
    check_luka_increment_moment,
    check_spine_mean,
    check_typical_height_tail,
    check_width_tail,
    d_g_functional,
    first_child_event,
    first_child_event_bruteforce,
    holder_moment_scan,
    moment_constant,
    replica_rng,
    rescaled_label_process,
    run_replicas,
    scaling_table,
    wilson_interval,
    within_factor,
)

from conftest import forests

QUAD = face_to_forest_degrees(family_generator("quadrangulation", 200))


def _draw(rng):
    return float(rng.random())


def test_replica_streams_independent_of_jobs():
    a = run_replicas(_draw, 40, 7, jobs=1)
    b = run_replicas(_draw, 40, 7, jobs=2)
    assert a == b
    assert a[3] == float(replica_rng(7, 3).random())
    assert len(set(a)) == 40


def test_wilson_interval_brackets_the_frequency():
    lo, hi = wilson_interval(30, 100)
    assert lo < 0.3 < hi
    assert wilson_interval(0, 100)[0] == 0
    assert wilson_interval(100, 100)[1] == 1
    assert wilson_interval(0, 0) == (0.0, 1.0)


def test_tail_report_verdicts():
    rep = TailCheckReport("toy", 100, [1.0, 2.0, 3.0], [90, 5, 0], [100, 100, 100], [0.5, 0.5, 0.5],
                          [True, True, False])
    assert rep.verdicts == ["FAIL", "PASS", "SKIP"]
    assert not rep.ok
    assert rep.to_csv().splitlines()[0] == "z,empirical,ci_low,ci_high,bound,verdict"


def test_bridge_min_tail_small_run():
    rep = check_bridge_min_tail(QUAD, 0.5, [1, 2, 40], 300, seed=1)
    assert rep.ok
    assert rep.hits[-1] == 0


def test_bridge_min_bound_tends_to_one():
    rep = check_bridge_min_tail(QUAD, 0.999, [1], 50, seed=0)
    assert rep.bound[0] > 0.99
    assert rep.ok


def test_moment_constant_matches_quadrature():
    mc = moment_constant(2, 1.0)
    assert mc["c"] == pytest.approx(96)
    assert mc["c_quad"] == pytest.approx(mc["c"], rel=1e-6)
    assert mc["C"] == pytest.approx(194)
    for p in (1, 3, 4):
        m = moment_constant(p, 0.5)
        assert m["c_quad"] == pytest.approx(m["c"], rel=1e-5)


def test_increment_tail_and_moment():
    reps = check_luka_increment_moment(QUAD, QUAD.degree_one_slack(), [(0.2, 0.4)], [0, 1, 2], 300, seed=2)
    assert all(r.ok for r in reps)
    assert reps[0].bound[0] >= 1  # x = 0 gives a trivial bound
    assert reps[0].extra["moment_ok"] is True


def test_lr_tail_skips_below_half():
    rep = check_lr_tail(QUAD, [0.25, 1], 200, seed=3)
    assert rep.verdicts[0] == "SKIP"
    assert rep.ok


def test_width_tail_small_run():
    rep = check_width_tail(QUAD, [1, 2, 4], 200, seed=4)
    assert rep.ok
    assert rep.extra["short_height_ok"]


def test_typical_height_zero_threshold():
    res = check_typical_height_tail(QUAD, [0, 1, 2, 3], 100, seed=5)
    assert res["empirical"][0] == 1.0
    assert all(a >= b for a, b in zip(res["empirical"], res["empirical"][1:]))


def test_lambda_zeta_all_values():
    res = check_lambda_zeta(QUAD, [-1, 1], 20, seed=0)
    assert res["median"] <= 1 / QUAD.n_vertices + 1e-12
    assert res["inverse_ok"]


def test_lambda_zeta_needs_hits():
    with pytest.raises(ValueError):
        check_lambda_zeta(QUAD, [0], 5, seed=0)


@settings(max_examples=80, deadline=None)
@given(forests(max_vertices=20, max_degree=3), st.integers(0, 5))
def test_first_child_event_matches_brute_force(f, cutoff):
    ds = DegreeSequence(f.degree_census())
    if ds.n_leaves == 0:
        return
    assert first_child_event(f, ds, cutoff) == first_child_event_bruteforce(f, ds, cutoff)


def test_first_child_event_can_fail():
    # a path of first children is a long first-child branch
    from bipmaps.encodings import Forest

    f = Forest([1, 1, 1, 1, 1, 0])
    ds = DegreeSequence(f.degree_census())
    assert not first_child_event(f, ds, 2)
    assert first_child_event(f, ds)  # the default cutoff exceeds the height


def test_en_event_small_forests_hold():
    res = check_en_event(QUAD, 20, seed=0)
    assert res["length_cutoff"] > res["max_height_seen"]
    assert res["frequency"] == 1.0


def test_spine_mean_check():
    res = check_spine_mean(DegreeSequence({0: 7, 1: 2, 2: 2, 4: 1}), 4000, seed=0)
    assert res["ok"]


def test_d_g_examples():
    assert d_g_functional([1.0, 1.0, 1.0], 0.2, 0.7) == 0
    assert d_g_functional([0.0, 1.0, 0.0], 0.0, 1.0) == 0
    assert d_g_functional([0.0, 1.0, 0.0], 0.5, 0.5) == 0


@given(st.lists(st.floats(-5, 5), min_size=2, max_size=8), st.floats(0, 1), st.floats(0, 1))
def test_d_g_brute_force(vals, s, t):
    g = np.asarray(vals)
    grid = np.linspace(0, 1, g.size)
    fine = np.linspace(0, 1, 2001)
    pts = np.unique(np.concatenate((fine, grid, [s, t])))
    gv = np.interp(pts, grid, g)
    lo, hi = min(s, t), max(s, t)
    inner = gv[(pts >= lo) & (pts <= hi)].min()
    outer = gv[(pts <= lo) | (pts >= hi)].min()
    expect = np.interp(s, grid, g) + np.interp(t, grid, g) - 2 * max(inner, outer)
    assert d_g_functional(g, s, t) == pytest.approx(expect, abs=1e-9)


def test_distance_bound_diagonal_and_exhaustive():
    ds = DegreeSequence({0: 4, 1: 1, 3: 1})
    for lf in enumerate_labelled_forests(ds):
        pm = forest_to_map(lf)
        n1 = ds.n_vertices + 1
        ii, jj = np.meshgrid(np.arange(n1), np.arange(n1))
        rep = check_distance_bound(lf, pm, np.column_stack((ii.ravel(), jj.ravel())))
        assert rep.ok
    diag = check_distance_bound(lf, pm, [[2, 2], [0, 0]])
    assert diag.ok and diag.worst_slack >= 2


def test_distance_bound_sampled_quadrangulation():
    ds = face_to_forest_degrees(family_generator("quadrangulation", 1000))
    rng = np.random.default_rng(0)
    lf = sample_labelled_forest(ds, rng)
    pm = forest_to_map(lf)
    assert check_distance_bound(lf, pm, 1000, rng).ok
    assert check_distance_bound(lf, pm, 200, np.random.default_rng(1),
                                dist=all_pairs_distances(pm.map)).ok


def test_rescaled_label_process_shape():
    lf = label_forest(sample_labelled_forest(QUAD, np.random.default_rng(0)).forest, np.random.default_rng(1))
    rp = rescaled_label_process(lf, QUAD)
    assert rp.times[0] == 0 and rp.times[-1] == 1
    assert rp.values[0] == 0


def test_holder_scan_moments_grow_with_the_gap():
    ds = face_to_forest_degrees(family_generator("quadrangulation", 2000))
    res = holder_moment_scan(ds, 2, [0.1, 0.03, 0.01], 40, seed=0)
    assert res["moments"][0] <= res["moments"][-1]
    # labels move like |t - s|^(1/4), so the second moment slope sits near 1/2
    assert 0.3 < res["slope"] < 0.7


def test_scaling_single_size_row():
    rows = scaling_table("2p-angulation", [128], {"p": 2}, 3, seed=0, pairs=50)
    assert len(rows) == 1
    assert rows[0]["diameter_median"] > 0


def test_scaling_ladder_scale():
    rows = scaling_table("2p-angulation", [256], {}, 2, seed=0, pairs=20, ladder=True)
    p = rows[0]["p"]
    assert p == 4
    assert rows[0]["scale"] == pytest.approx((p * (p - 1) * 256) ** 0.25)


def test_within_factor():
    assert within_factor([1.0, 1.9])
    assert not within_factor([1.0, 2.1])
