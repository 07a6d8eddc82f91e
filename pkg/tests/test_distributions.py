import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, stats

from restart_tails.distributions import (
    Exponential,
    Gamma,
    LogNormal,
    Pareto,
    PointMass,
    PolyEndpoint,
    TailClassKind,
    Uniform,
    Weibull,
    parse_distribution,
    require_failure_role,
    sum_truncated_samples,
)

# families with a proper density, one moderate parameter set each
DENSITY_FAMILIES = [
    Exponential(1.0),
    Exponential(2.5),
    Gamma(2.0, 3.0),
    Gamma(0.7, 1.2),
    Weibull(0.5, 1.0),
    Weibull(2.0, 1.5),
    Pareto(2.0, 1.0, 0.0),
    Pareto(1.5, 2.0, 1.0),
    Pareto(3.0, 0.5, -0.5),
    LogNormal(0.0, 1.0),
    LogNormal(0.5, 0.7),
    Uniform(0.0, 1.0),
    Uniform(0.5, 2.0),
    PolyEndpoint("auto", 0.0, 1.0),
    PolyEndpoint(8.0, 1.0, 1.0),
]


def _quad_over_support(dist, fn):
    lo, hi = dist.support()
    mid = dist.quantile(0.5)
    pieces = [lo, mid, dist.quantile(0.99)]
    if hi == math.inf:
        pieces.append(float(dist.inverse_tail(1e-10)))
        pieces.append(math.inf)
    else:
        pieces.append(hi)
    total = 0.0
    for a, b in zip(pieces[:-1], pieces[1:]):
        val, _ = integrate.quad(fn, a, b, epsabs=1e-13, epsrel=1e-11, limit=300)
        total += val
    return total


@pytest.mark.parametrize("dist", DENSITY_FAMILIES, ids=str)
def test_density_integrates_to_one(dist):
    assert abs(_quad_over_support(dist, lambda t: float(dist.density(t))) - 1.0) <= 1e-8


@pytest.mark.parametrize("dist", DENSITY_FAMILIES, ids=str)
def test_tail_matches_density_integral(dist):
    lo, hi = dist.support()
    for p in (0.1, 0.5, 0.9, 0.99):
        t = float(dist.quantile(p))
        if hi == math.inf:
            edges = [t] + [float(dist.inverse_tail(s))
                           for s in (1e-2, 1e-4, 1e-6, 1e-8, 1e-10, 1e-12)
                           if s < float(dist.tail(t))]
            residual = 1e-12
        else:
            edges = [t, hi]
            residual = 0.0
        val = residual
        for a, b in zip(edges[:-1], edges[1:]):
            piece, _ = integrate.quad(lambda y: float(dist.density(y)), a, b,
                                      epsabs=1e-13, epsrel=1e-11, limit=300)
            val += piece
        assert abs(float(dist.tail(t)) - val) <= 1e-7


@pytest.mark.parametrize("dist", DENSITY_FAMILIES, ids=str)
def test_quantile_cdf_roundtrip(dist):
    for p in np.linspace(0.01, 0.99, 25):
        t = float(dist.quantile(p))
        assert float(dist.cdf(t)) == pytest.approx(p, abs=1e-9)
        t2 = float(dist.quantile(float(dist.cdf(t))))
        assert t2 == pytest.approx(t, rel=1e-9, abs=1e-12)


@pytest.mark.parametrize("dist", DENSITY_FAMILIES, ids=str)
def test_tail_monotone_and_normalized(dist):
    lo, hi = dist.support()
    ts = np.linspace(max(lo - 0.5, 0.0), float(dist.quantile(0.999)), 200)
    tails = np.asarray(dist.tail(ts))
    assert np.all(np.diff(tails) <= 1e-12)
    assert float(dist.tail(max(lo - 1.0, 0.0))) == pytest.approx(1.0) or lo == 0.0
    assert float(dist.tail(lo)) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("dist", DENSITY_FAMILIES, ids=str)
def test_log_tail_consistent(dist):
    for p in (0.3, 0.9, 0.999):
        t = float(dist.quantile(p))
        assert math.exp(float(dist.log_tail(t))) == pytest.approx(float(dist.tail(t)), rel=1e-9)


@pytest.mark.parametrize("dist", DENSITY_FAMILIES, ids=str)
def test_sampling_matches_cdf(dist):
    rng = np.random.default_rng(hash(str(dist)) % 2**32)
    draws = dist.sample(rng, 100000)
    res = stats.kstest(draws, lambda v: np.asarray(dist.cdf(v)))
    assert res.pvalue > 1e-3


def test_exponential_values():
    e = Exponential(1.0)
    assert float(e.density(0.0)) == 1.0
    assert float(e.quantile(1.0 - math.exp(-1.0))) == pytest.approx(1.0, rel=1e-12)
    assert Exponential(2.0).tail(0.0) == 1.0
    assert Exponential(2.0).mean() == 0.5


def test_gamma_density_value():
    # oracle: high-precision evaluation of the density integrand
    import mpmath as mp

    expected = float(mp.mpf(3) ** 2 * mp.mpf(1) * mp.e ** -3 / mp.gamma(2))
    assert float(Gamma(2.0, 3.0).density(1.0)) == pytest.approx(expected, rel=1e-12)


def test_weibull_tail_value():
    assert float(Weibull(0.5, 1.0).tail(4.0)) == pytest.approx(math.exp(-2.0), rel=1e-12)


def test_uniform_values():
    u = Uniform(0.0, 1.0)
    assert float(u.tail(0.25)) == 0.75
    assert u.mean() == 0.5


def test_pointmass_values():
    p = PointMass(3.0)
    assert float(p.quantile(0.5)) == 3.0
    rng = np.random.default_rng(0)
    assert PointMass(2.0).sample(rng) == 2.0
    assert p.mean() == 3.0


def test_lognormal_median():
    assert float(LogNormal(0.0, 1.0).quantile(0.5)) == pytest.approx(1.0, rel=1e-12)


def test_sampling_law_of_large_numbers():
    rng = np.random.default_rng(2024)
    u = Uniform(0.0, 1.0).sample(rng, 10**6)
    sigma = math.sqrt(1.0 / 12.0 / 10**6)
    assert abs(float(np.mean(u)) - 0.5) <= 3.0 * sigma
    e = Exponential(1.0).sample(rng, 10**6)
    p = math.exp(-1.0)
    sigma = math.sqrt(p * (1.0 - p) / 10**6)
    assert abs(float(np.mean(e > 1.0)) - p) <= 3.0 * sigma


def test_pareto_below_support_and_mean():
    p = Pareto(2.0, 1.0, 0.0)
    assert float(p.density(0.5)) == 0.0
    # oracle: mean = scale + integral of the tail over [scale, inf)
    val, _ = integrate.quad(lambda t: float(p.tail(t)), 1.0, np.inf)
    assert p.mean() == pytest.approx(1.0 + val, rel=1e-10)
    assert p.mean() == pytest.approx(2.0, rel=1e-12)


def test_pareto_infinite_mean_rejected_lazily():
    p = Pareto(1.0, 2.0, 0.0)  # constructible: tail index 1
    with pytest.raises(ValueError, match="mean"):
        p.mean()
    # heavier slow factor keeps it infinite; lighter makes it finite
    with pytest.raises(ValueError):
        Pareto(1.0, 2.0, 1.0).mean()
    assert Pareto(1.0, 2.0, -2.5).mean() > 0.0


def test_pareto_slow_factor_matches_density():
    p = Pareto(1.5, 2.0, 1.0)
    c, pw = p.slow_factor()
    t = 1e8
    approx = c * math.log(t) ** pw / t ** (p.index + 1.0)
    assert float(p.density(t)) == pytest.approx(approx, rel=0.05)


def test_polyendpoint_auto_is_uniform():
    pe = PolyEndpoint("auto", 0.0, 1.0)
    assert pe.amplitude == 1.0
    assert pe.width == 1.0
    assert float(pe.density(0.3)) == 1.0


def test_polyendpoint_explicit_amplitude():
    pe = PolyEndpoint(8.0, 1.0, 1.0)
    # density 8*(1-t) on [0.5, 1]: integrates to one on its own support
    assert pe.width == pytest.approx(0.5)
    assert float(pe.density(0.75)) == pytest.approx(2.0)
    with pytest.raises(ValueError, match="amplitude"):
        PolyEndpoint(0.5, 1.0, 1.0)


def test_partial_moments_against_quadrature():
    for dist in (Exponential(1.3), Gamma(2.0, 1.0), Weibull(1.5, 2.0),
                 Pareto(2.5, 1.0, 0.0), Pareto(1.0, 2.0, 0.0), Pareto(2.0, 1.0, 1.0),
                 LogNormal(0.2, 0.8), Uniform(0.5, 2.0), PolyEndpoint(8.0, 1.0, 1.0)):
        t = float(dist.quantile(0.9))
        lo = dist.support()[0]
        m1, _ = integrate.quad(lambda y: y * float(dist.density(y)), lo, t,
                               epsrel=1e-11, limit=300)
        m2, _ = integrate.quad(lambda y: y * y * float(dist.density(y)), lo, t,
                               epsrel=1e-11, limit=300)
        assert dist.partial_mean(t) == pytest.approx(m1, rel=1e-8, abs=1e-12)
        assert dist.partial_second_moment(t) == pytest.approx(m2, rel=1e-8, abs=1e-12)


def test_tail_class_mapping():
    K = TailClassKind
    cases = [
        (Exponential(2.0), "failure", K.EXP_TAIL, 2.0, 1.0),
        (Exponential(2.0), "task", K.EXP_DENSITY, 2.0, 1.0),
        (Gamma(2.0, 3.0), "task", K.EXP_DENSITY, 3.0, 1.0),
        (Weibull(0.5, 2.0), "task", K.EXP_DENSITY, 2.0**-0.5, 0.5),
        (Weibull(0.5, 2.0), "failure", K.EXP_TAIL, 2.0**-0.5, 0.5),
        (Pareto(3.0, 1.0, 0.0), "task", K.POWER_DENSITY, 3.0, None),
        (Pareto(3.0, 1.0, 0.0), "failure", K.POWER_TAIL, 3.0, None),
    ]
    for dist, role, kind, decay, power in cases:
        tag = dist.tail_class(role)
        assert tag.kind is kind
        assert tag.decay == pytest.approx(decay)
        if power is not None:
            assert tag.power == pytest.approx(power)
    assert Uniform(0.0, 1.0).tail_class("task").kind is K.BOUNDED
    assert Uniform(0.0, 1.0).tail_class("task").endpoint == 1.0
    assert PointMass(2.0).tail_class("task").endpoint == 2.0
    assert LogNormal(0.0, 1.0).tail_class("task").kind is K.UNCLASSIFIED


def test_tail_class_total_on_supported_families():
    for dist in DENSITY_FAMILIES + [PointMass(1.0)]:
        for role in ("task", "failure"):
            assert dist.tail_class(role) == dist.tail_class(role)


def test_role_validation():
    with pytest.raises(ValueError, match="PointMass"):
        require_failure_role(PointMass(1.0))
    require_failure_role(Exponential(1.0))


def test_quantile_rejects_bad_p():
    with pytest.raises(ValueError):
        Exponential(1.0).quantile(0.0)
    with pytest.raises(ValueError):
        Exponential(1.0).quantile(1.0)


def test_constructor_validation():
    with pytest.raises(ValueError):
        Exponential(0.0)
    with pytest.raises(ValueError):
        Uniform(-1.0, 1.0)
    with pytest.raises(ValueError):
        Uniform(2.0, 1.0)
    with pytest.raises(ValueError):
        Pareto(-1.0, 1.0, 0.0)
    with pytest.raises(ValueError):
        PointMass(-2.0)


def test_parse_distribution_roundtrip_and_errors():
    for dist in DENSITY_FAMILIES + [PointMass(2.0)]:
        assert parse_distribution(dist.spec_string()) == dist
    assert parse_distribution("polyendpoint(amplitude=auto, exponent=0.0, endpoint=2.0)") \
        == PolyEndpoint("auto", 0.0, 2.0)
    with pytest.raises(ValueError, match="unknown distribution"):
        parse_distribution("cauchy(scale=1)")
    with pytest.raises(ValueError, match="unknown parameter"):
        parse_distribution("exponential(rate=1.0, shift=2)")
    with pytest.raises(ValueError, match="malformed"):
        parse_distribution("exponential")


def test_inverse_tail_deep():
    e = Exponential(1.0)
    assert float(e.inverse_tail(1e-18)) == pytest.approx(18.0 * math.log(10.0), rel=1e-12)
    p = Pareto(2.0, 1.0, 0.0)
    assert float(p.inverse_tail(1e-12)) == pytest.approx(1e6, rel=1e-9)


def test_sum_truncated_samples_matches_scalar_loop():
    dist = Exponential(1.0)
    counts = np.array([3, 0, 7, 1], dtype=np.int64)
    caps = np.asarray(dist.cdf(np.array([2.0, 2.0, 1.0, 3.0])))
    got = sum_truncated_samples(dist, counts, caps, np.random.default_rng(99), chunk=4)
    # replay the identical uniform stream through the same chunking
    rng = np.random.default_rng(99)
    expect = np.zeros(4)
    stream = []
    remaining = counts.copy()
    pos = 0
    while pos < remaining.size:
        if remaining[pos] == 0:
            pos += 1
            continue
        sel, take, room, j = [], [], 4, pos
        while j < remaining.size and room > 0:
            c = int(remaining[j])
            if c == 0:
                j += 1
                continue
            grab = min(c, room)
            sel.append(j)
            take.append(grab)
            remaining[j] -= grab
            room -= grab
            if remaining[j] > 0:
                break
            j += 1
        u = rng.random(sum(take))
        k = 0
        for jj, tk in zip(sel, take):
            for _ in range(tk):
                expect[jj] += float(dist._ppf(caps[jj] * (1.0 - u[k])))
                k += 1
        pos = j
    np.testing.assert_allclose(got, expect, rtol=1e-12)


@settings(max_examples=60, deadline=None)
@given(
    rate=st.floats(0.1, 10.0),
    p=st.floats(1e-6, 1.0 - 1e-6),
)
def test_exponential_quantile_inverts_cdf(rate, p):
    e = Exponential(rate)
    assert float(e.cdf(e.quantile(p))) == pytest.approx(p, abs=1e-10)


@settings(max_examples=60, deadline=None)
@given(
    index=st.floats(0.5, 5.0),
    scale=st.floats(0.2, 5.0),
    log_power=st.floats(-1.5, 2.0),
    t_lo=st.floats(0.0, 50.0),
    gap=st.floats(0.1, 50.0),
)
def test_pareto_tail_nonincreasing(index, scale, log_power, t_lo, gap):
    p = Pareto(index, scale, log_power)
    assert float(p.tail(t_lo)) >= float(p.tail(t_lo + gap)) - 1e-12


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(DENSITY_FAMILIES), st.floats(0.01, 0.99), st.floats(0.01, 0.99))
def test_quantile_monotone(dist, p1, p2):
    lo, hi = sorted((p1, p2))
    assert float(dist.quantile(lo)) <= float(dist.quantile(hi)) + 1e-12
