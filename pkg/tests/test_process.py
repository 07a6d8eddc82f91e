import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from restart_tails.config import parse_config
from restart_tails.distributions import Exponential, Pareto, PointMass, Uniform
from restart_tails.lundberg import RootError, importance_tail
from restart_tails.process import (
    QuadratureParams,
    bracketing_integrals,
    coupled_order_check,
    crude_tail,
    n_pmf_diagonal,
    parallel_makespan,
    run_once,
    semi_analytic_tail,
    simulate,
    stratified_tail,
    worker_generators,
)


def make_cfg(n=100000, seed=7, workers=1, task="exponential(rate=1.0)",
             failure="exponential(rate=1.0)", x_grid="5,10,20"):
    return parse_config(
        f"F = {task}\nG = {failure}\ncommand = simulate\n"
        f"x_grid = {x_grid}\nn = {n}\nseed = {seed}\nworkers = {workers}\n"
    )


# ---------------------------------------------------------------------------
# run_once


def test_run_once_zero_task(rng):
    s = run_once(PointMass(0.0), Exponential(1.0), rng)
    assert (s.task_time, s.n_failures, s.total_time) == (0.0, 0, 0.0)


def test_run_once_failures_never_bite(rng):
    # every failure time exceeds every possible task time
    for _ in range(50):
        s = run_once(Uniform(0.0, 1.0), Uniform(1.0, 2.0), rng)
        assert s.n_failures == 0
        assert s.total_time == s.task_time


def test_run_once_identity_and_reproducibility():
    r1 = np.random.default_rng(123)
    r2 = np.random.default_rng(123)
    a = run_once(Exponential(1.0), Exponential(1.0), r1)
    b = run_once(Exponential(1.0), Exponential(1.0), r2)
    assert a == b
    assert a.total_time == a.task_time + a.lost_time


def test_run_once_diagonal_pmf(rng):
    counts = np.zeros(3)
    reps = 30000
    for _ in range(reps):
        s = run_once(Exponential(1.0), Exponential(1.0), rng)
        if s.n_failures < 3:
            counts[s.n_failures] += 1
    for n in range(3):
        p = n_pmf_diagonal(n)
        se = math.sqrt(p * (1 - p) / reps)
        assert counts[n] / reps == pytest.approx(p, abs=5 * se)


def test_run_once_rejects_pointmass_failures(rng):
    with pytest.raises(ValueError, match="PointMass"):
        run_once(Exponential(1.0), PointMass(1.0), rng)


# ---------------------------------------------------------------------------
# pmf


def test_n_pmf_values():
    assert n_pmf_diagonal(0) == 0.5
    assert n_pmf_diagonal(1) == pytest.approx(1.0 / 6.0)
    with pytest.raises(ValueError):
        n_pmf_diagonal(-1)


def test_n_pmf_telescopes():
    # partial sums telescope: sum through n plus 1/(n+2) is exactly one
    total = sum(n_pmf_diagonal(k) for k in range(200)) + 1.0 / 201.0
    assert total == pytest.approx(1.0, abs=1e-12)
    partial = float(np.sum([n_pmf_diagonal(k) for k in range(10**6)]))
    assert partial == pytest.approx(1.0, abs=1.1e-6)


# ---------------------------------------------------------------------------
# simulate


def test_simulate_deterministic():
    cfg = make_cfg(n=20000, workers=3)
    assert simulate(cfg) == simulate(cfg)


def test_simulate_single_run():
    s = simulate(make_cfg(n=1))
    assert s.n_histogram.sum() == 1


def test_simulate_histogram_sums_and_tail_monotone():
    s = simulate(make_cfg(n=50000, workers=2))
    assert int(s.n_histogram.sum()) == 50000
    assert np.all(np.diff(s.tail_at) <= 0.0)


def test_simulate_diagonal_histogram():
    s = simulate(make_cfg(n=10**6, seed=31, workers=4))
    p0 = s.n_histogram[0] / s.n
    se = math.sqrt(0.5 * 0.5 / s.n)
    assert p0 == pytest.approx(0.5, abs=4 * se)


def test_simulate_worker_split_changes_stream_but_not_law():
    a = simulate(make_cfg(n=40000, workers=1, seed=9))
    b = simulate(make_cfg(n=40000, workers=4, seed=9))
    assert a.n_histogram[0] != b.n_histogram[0] or a.mean_total != b.mean_total
    assert a.n_histogram[0] / a.n == pytest.approx(b.n_histogram[0] / b.n, abs=0.01)


def test_simulate_guard_trips():
    cfg = make_cfg(task="uniform(lower=1.0, upper=2.0)",
                   failure="uniform(lower=0.0, upper=1.0)", n=10)
    from restart_tails.process import SimulationGuardError

    with pytest.raises(SimulationGuardError):
        simulate(cfg)


# ---------------------------------------------------------------------------
# crude tail


def test_crude_tail_at_zero_point_one():
    est = crude_tail(make_cfg(n=5000), 0.0)
    assert est.point == 1.0
    assert est.upper == 1.0


def test_crude_tail_monotone():
    cfg = make_cfg(n=200000, seed=4)
    e1 = crude_tail(cfg, 5.0)
    e2 = crude_tail(cfg, 10.0)
    assert e2.point <= e1.point + 3.0 * (e1.stderr + e2.stderr)
    assert e1.lower <= e1.point <= e1.upper


def test_crude_tail_diagonal_scaling():
    cfg = make_cfg(n=10**6, seed=77)
    est = crude_tail(cfg, 20.0)
    # the reciprocal-in-x law puts the scaled point near one
    assert 0.7 <= est.point * 20.0 <= 1.3


# ---------------------------------------------------------------------------
# semi-analytic


def test_semi_analytic_rejects_nonpositive_x():
    with pytest.raises(ValueError):
        semi_analytic_tail(Exponential(1.0), Exponential(1.0), 0.0)


def test_semi_analytic_small_x_upper_near_one():
    est = semi_analytic_tail(Exponential(1.0), Exponential(1.0), 1e-9)
    assert est.upper > 0.99


def test_semi_analytic_bounds_order():
    for task, failure, x in (
        (Exponential(1.0), Exponential(1.0), 50.0),
        (Exponential(2.0), Exponential(1.0), 200.0),
        (Pareto(2.0, 1.0, 0.0), Exponential(1.0), 100.0),
        (Uniform(0.0, 1.0), Exponential(1.0), 12.0),
    ):
        est = semi_analytic_tail(task, failure, x)
        assert est.lower <= est.point <= est.upper


def test_semi_analytic_diagonal_matches_reciprocal():
    est = semi_analytic_tail(Exponential(1.0), Exponential(1.0), 100.0)
    assert 0.5 <= est.point * 100.0 <= 2.0
    ratios = [semi_analytic_tail(Exponential(1.0), Exponential(1.0), x).point * x
              for x in (100.0, 1000.0, 10000.0)]
    devs = [abs(r - 1.0) for r in ratios]
    assert devs[0] > devs[1] > devs[2]
    assert ratios[-1] == pytest.approx(1.0, abs=0.01)


def test_semi_analytic_matches_crude_at_moderate_x():
    cfg = make_cfg(n=2 * 10**6, seed=5)
    for x in (20.0, 50.0):
        mc = crude_tail(cfg, x)
        sa = semi_analytic_tail(Exponential(1.0), Exponential(1.0), x)
        assert abs(sa.point - mc.point) <= 3.0 * mc.stderr + 0.02 * mc.point


def test_semi_analytic_pointmass_task():
    est = semi_analytic_tail(PointMass(2.0), Exponential(1.0), 10.0)
    oracle = importance_tail(Exponential(1.0), 2.0, 8.0, 200000, np.random.default_rng(8))
    assert est.point == pytest.approx(oracle.point, rel=0.02)
    assert semi_analytic_tail(PointMass(2.0), Exponential(1.0), 1.5).point == 1.0


def test_semi_analytic_truncation_reported():
    est = semi_analytic_tail(Exponential(2.0), Exponential(1.0), 1e6,
                             QuadratureParams(eps_trunc=1e-12))
    assert est.trunc_mass == pytest.approx(1e-12, rel=0.1)
    tight = semi_analytic_tail(Exponential(2.0), Exponential(1.0), 1e6,
                               QuadratureParams(eps_trunc=1e-18))
    assert tight.point > est.point  # the omitted band carries real mass here


def test_semi_analytic_rejects_bounded_failure_below_task():
    with pytest.raises(RootError):
        semi_analytic_tail(Exponential(1.0), Uniform(0.0, 1.0), 10.0)


# ---------------------------------------------------------------------------
# comparison integrals


def test_bracketing_integrals_ordering():
    im, ip = bracketing_integrals(Exponential(1.0), Exponential(1.0), 100.0, 0.3)
    assert ip <= im


def test_bracketing_integrals_diagonal_closed_form():
    # identical laws collapse to (1 - exp(-c x)) / (c x) with c = 1 -/+ eps
    x, eps = 1000.0, 0.1
    im, ip = bracketing_integrals(Exponential(1.0), Exponential(1.0), x, eps)
    assert im == pytest.approx((1.0 - math.exp(-x * 0.9)) / (x * 0.9), rel=1e-8)
    assert ip == pytest.approx((1.0 - math.exp(-x * 1.1)) / (x * 1.1), rel=1e-8)
    assert ip * x * 1.1 == pytest.approx(1.0, abs=0.05)
    assert im * x * 0.9 == pytest.approx(1.0, abs=0.05)


def test_bracketing_integrals_bracket_semi_analytic():
    x = 1000.0
    est = semi_analytic_tail(Exponential(1.0), Exponential(1.0), x)
    im, ip = bracketing_integrals(Exponential(1.0), Exponential(1.0), x, 0.2)
    assert ip * (1.0 - 0.2) <= est.point <= im * (1.0 + 0.2)


def test_bracketing_integrals_rejects():
    with pytest.raises(ValueError):
        bracketing_integrals(Exponential(1.0), Exponential(1.0), -1.0, 0.1)
    with pytest.raises(ValueError):
        bracketing_integrals(Exponential(1.0), Exponential(1.0), 10.0, 1.5)


# ---------------------------------------------------------------------------
# makespan


def test_makespan_single_subjob_matches_totals(rng):
    m = parallel_makespan(Exponential(1.0), Exponential(1.0), 1, 4000, rng)
    cfg = make_cfg(n=4000, seed=55)
    direct = []
    gen = worker_generators(55, 1)[0]
    for _ in range(4000):
        direct.append(run_once(Exponential(1.0), Exponential(1.0), gen).total_time)
    res = stats.ks_2samp(m, np.asarray(direct))
    assert res.pvalue > 1e-3


def test_makespan_medians_grow(rng):
    meds = [float(np.median(parallel_makespan(Exponential(1.0), Exponential(1.0),
                                              n_sub, 3000, rng)))
            for n_sub in (1, 4, 16)]
    assert meds[0] < meds[1] < meds[2]


def test_makespan_median_growth_unbounded(rng):
    # the reciprocal total-time tail makes the makespan median grow roughly
    # linearly in the number of subjobs
    meds = [float(np.median(parallel_makespan(Exponential(1.0), Exponential(1.0),
                                              n_sub, 10**4, rng)))
            for n_sub in (1, 16, 256)]
    assert meds[0] < meds[1] < meds[2]
    assert meds[2] > 8.0 * meds[1]


# ---------------------------------------------------------------------------
# coupling


def test_coupled_identical_tasks_zero(rng):
    assert coupled_order_check(Exponential(1.0), Exponential(1.0),
                               Exponential(1.0), 2000, rng) == 0


def test_coupled_exponential_pair_zero(rng):
    assert coupled_order_check(Exponential(2.0), Exponential(1.0),
                               Exponential(1.0), 20000, rng) == 0


def test_coupled_uniform_pair_zero(rng):
    assert coupled_order_check(Uniform(0.0, 1.0), Uniform(0.0, 2.0),
                               Exponential(1.0), 20000, rng) == 0


def test_coupled_rejects_unordered(rng):
    with pytest.raises(ValueError, match="stochastic-order"):
        coupled_order_check(Exponential(1.0), Exponential(2.0), Exponential(1.0), 10, rng)


# ---------------------------------------------------------------------------
# stratified oracle


def test_stratified_tail_requires_bounded_task(rng):
    with pytest.raises(ValueError):
        stratified_tail(Exponential(1.0), Exponential(1.0), 10.0, 8, 100, rng)
    with pytest.raises(ValueError):
        stratified_tail(Uniform(0.0, 1.0), Exponential(1.0), 0.5, 8, 100, rng)


def test_stratified_tail_tracks_pointwise_estimates(rng):
    est = stratified_tail(Uniform(0.0, 1.0), Exponential(1.0), 6.0, 48, 2000, rng)
    assert 0.0 < est.point < 1e-2
    assert est.stderr < est.point


# ---------------------------------------------------------------------------
# properties


@settings(max_examples=30, deadline=None)
@given(n=st.integers(0, 10**6))
def test_pmf_positive_and_summable(n):
    p = n_pmf_diagonal(n)
    assert 0.0 < p <= 0.5


@settings(max_examples=10, deadline=None)
@given(seed=st.integers(0, 2**31), workers=st.integers(1, 6))
def test_simulate_bit_reproducible_property(seed, workers):
    cfg = make_cfg(n=2000, seed=seed, workers=workers)
    assert simulate(cfg) == simulate(cfg)
