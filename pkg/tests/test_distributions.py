import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate, stats

from cutapprox import DomainError, ParetoParams, Scenario, make_stream
from cutapprox.distributions import (
    clutter_pareto,
    pareto_cdf,
    pareto_pdf,
    pareto_quantile,
    pareto_sf,
    sample_clutter,
    sample_signal,
    sample_speckle,
    speckle_pdf,
)
from cutapprox.monte_carlo import EmpiricalCdf, ks_distance

N = 10**6


def test_scenario_rejects_nonpositive_fields():
    for bad in (dict(alpha=0), dict(beta=-1), dict(lam=float("nan")), dict(mu=float("inf"))):
        kwargs = dict(alpha=1.0, beta=1.0, lam=1.0, mu=1.0) | bad
        with pytest.raises(DomainError, match=next(iter(bad))):
            Scenario(**kwargs)


def test_pareto_params_validation():
    with pytest.raises(DomainError):
        ParetoParams(0.0, 1.0)
    with pytest.raises(DomainError):
        ParetoParams(1.0, -2.0)


@pytest.mark.parametrize("alpha,beta", [(4.7, 0.3), (1.0, 2.0), (0.4, 5.0)])
def test_pdf_at_zero(alpha, beta):
    assert pareto_pdf(0.0, ParetoParams(alpha, beta)) == pytest.approx(alpha / beta, rel=1e-15)


def test_pdf_at_scale_with_unit_shape():
    beta = 0.7
    assert pareto_pdf(beta, ParetoParams(1.0, beta)) == pytest.approx(1 / (4 * beta), rel=1e-15)


def test_pdf_integrates_to_cdf():
    p = ParetoParams(4.7, 0.3)
    val, _ = integrate.quad(lambda t: pareto_pdf(t, p), 0.0, 10.0, epsabs=1e-13, epsrel=1e-13, limit=200)
    assert abs(val - pareto_cdf(10.0, p)) < 1e-8


def test_pdf_integrates_to_one():
    p = ParetoParams(2.5, 1.3)
    val, _ = integrate.quad(lambda t: pareto_pdf(t, p), 0.0, np.inf, epsabs=1e-12)
    assert val == pytest.approx(1.0, abs=1e-9)


def test_cdf_examples():
    assert pareto_cdf(0.0, ParetoParams(3.0, 2.0)) == 0.0
    for alpha in (0.5, 1.0, 4.7, 10.0):
        assert pareto_cdf(0.3, ParetoParams(alpha, 0.3)) == pytest.approx(1 - 2.0 ** -alpha, rel=1e-14)
    assert pareto_cdf(1.0, ParetoParams(2.0, 1.0)) == pytest.approx(0.75, rel=1e-15)


def test_domain_errors():
    p = ParetoParams(2.0, 1.0)
    with pytest.raises(DomainError):
        pareto_pdf(-1e-9, p)
    with pytest.raises(DomainError):
        pareto_cdf(np.array([1.0, -1.0]), p)
    for q in (-0.1, 1.0, 1.5):
        with pytest.raises(DomainError):
            pareto_quantile(q, p)


def test_quantile_examples():
    p = ParetoParams(4.7, 0.3)
    assert pareto_quantile(0.0, p) == 0.0
    assert pareto_quantile(1 - 2.0 ** -4.7, p) == pytest.approx(0.3, rel=1e-13)


def test_quantile_round_trip():
    rng = np.random.default_rng(2024)
    q = rng.uniform(0, 1, 1000)
    for alpha, beta in [(4.7, 0.3), (0.8, 2.0), (10.0, 0.05)]:
        p = ParetoParams(alpha, beta)
        assert np.max(np.abs(pareto_cdf(pareto_quantile(q, p), p) - q)) < 1e-12


@given(
    alpha=st.floats(0.2, 20.0),
    beta=st.floats(1e-3, 1e3),
    a=st.floats(0.0, 1e4),
    b=st.floats(0.0, 1e4),
)
def test_cdf_monotone_and_bounded(alpha, beta, a, b):
    p = ParetoParams(alpha, beta)
    lo, hi = sorted((a, b))
    f_lo, f_hi = pareto_cdf(lo, p), pareto_cdf(hi, p)
    assert 0.0 <= f_lo <= f_hi <= 1.0
    assert pareto_sf(hi, p) == pytest.approx(1 - f_hi, abs=1e-15)


def test_pdf_matches_cdf_derivative_on_log_grid():
    p = ParetoParams(4.7, 0.3)
    t = np.geomspace(1e-3, 1e2, 40)
    h = 1e-5 * t
    fd = (pareto_cdf(t + h, p) - pareto_cdf(t - h, p)) / (2 * h)
    pdf = pareto_pdf(t, p)
    # skip the far tail where the CDF difference is lost to rounding
    keep = pdf > 1e-6
    assert np.max(np.abs(fd[keep] / pdf[keep] - 1)) < 1e-6


def test_speckle_pdf_normalised():
    s = Scenario(4.7, 0.3, 1.0, 1.0)
    val, _ = integrate.quad(lambda k: speckle_pdf(k, s), 0.0, np.inf)
    assert val == pytest.approx(1.0, abs=1e-9)


def test_speckle_moment():
    s = Scenario(4.7, 0.3, 1.0, 1.0)
    k = sample_speckle(s, make_stream(11), N)
    k2 = k * k
    assert np.all(k > 0)
    assert k2.mean() == pytest.approx(0.3 / 3.7, rel=0.01)
    se = k2.std() / math.sqrt(N)
    assert abs(k2.mean() - 0.3 / 3.7) < 5 * se


def test_speckle_median_survival():
    s = Scenario(4.7, 0.3, 1.0, 1.0)
    m = stats.invgamma(4.7, scale=0.3).median()
    k = sample_speckle(s, make_stream(12), N)
    assert np.mean(k * k > m) == pytest.approx(0.5, abs=0.002)


@pytest.mark.parametrize("mu", [1.0, 2.0])
def test_clutter_intensity_is_pareto(mu):
    s = Scenario(4.7, 0.3, 1.0, mu)
    c = sample_clutter(s, make_stream(13), N)
    p = ParetoParams(4.7, 0.3 / mu)
    assert clutter_pareto(s) == p
    d = ks_distance(EmpiricalCdf.from_samples(c.intensity), lambda x: pareto_cdf(x, p))
    assert d < 0.002


def test_clutter_components_zero_mean():
    s = Scenario(4.7, 0.3, 1.0, 1.0)
    c = sample_clutter(s, make_stream(14), N)
    for comp in (c.re, c.im):
        assert abs(comp.mean()) < 4 * comp.std() / math.sqrt(N)


def test_clutter_sampler_ks_over_seeds():
    s = Scenario(4.7, 0.3, 1.0, 1.0)
    p = clutter_pareto(s)
    rejections = 0
    for seed in range(100):
        x = sample_clutter(s, make_stream(seed, 7), 10**5).intensity
        if stats.kstest(x, lambda t: pareto_cdf(t, p)).pvalue < 0.001:
            rejections += 1
    assert rejections <= 1


def test_signal_power():
    s = Scenario(4.7, 0.3, 10.0, 1.0)
    sig = sample_signal(s, make_stream(15), N)
    assert sig.intensity.mean() == pytest.approx(0.1, rel=0.01)
    assert abs(np.corrcoef(sig.re, sig.im)[0, 1]) < 0.01


def test_signal_vanishes_for_huge_lambda():
    s = Scenario(4.7, 0.3, 1e12, 1.0)
    assert sample_signal(s, make_stream(16), N).intensity.mean() < 1e-11


def test_streams_reproducible_and_distinct():
    a = make_stream(5, 1).random(8)
    assert np.array_equal(a, make_stream(5, 1).random(8))
    assert not np.array_equal(a, make_stream(5, 2).random(8))
    assert not np.array_equal(a, make_stream(6, 1).random(8))
