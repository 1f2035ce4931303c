"""Channel model: dB algebra, correlation law, exceedance laws and sampling.

These tests exercise:
  - closed-form values of the conversions and the distance law,
  - the joint exceedance against Sheppard's orthant formula and Monte Carlo,
  - coupling bounds and monotonicity in rho,
  - the correlated sampler's moments and determinism.
"""
from __future__ import annotations

import math

import numpy as np
import pytest
from scipy import integrate

from src.channel.model import (
    LognormalFade,
    RainFadeParams,
    SiteGeometry,
    attenuation_db_to_gain,
    correlation_from_distance,
    gain_to_attenuation_db,
    joint_exceed_prob,
    marginal_exceed_prob,
    normal_tail,
    sample_pair,
    sample_pairs,
)
from src.errors import DomainError

STD_NORMAL = dict(m1=0.0, s1=1.0, m2=0.0, s2=1.0)


# ---- Correlation law ----


def test_correlation_examples() -> None:
    """Ensures: rho(D) is 1 at zero separation and vanishes far apart."""
    assert correlation_from_distance(0.0) == pytest.approx(1.0, abs=1e-15)
    assert correlation_from_distance(20.0) == pytest.approx(0.5425162, abs=1e-6)
    assert correlation_from_distance(10_000.0) < 1e-6


def test_correlation_strictly_decreasing() -> None:
    """Ensures: correlation falls strictly with separation."""
    ds = [0.0, 1.0, 5.0, 20.0, 50.0, 100.0, 150.0, 300.0, 1000.0]
    rhos = [correlation_from_distance(d) for d in ds]
    assert all(a > b for a, b in zip(rhos, rhos[1:]))
    assert SiteGeometry(20.0).rho == correlation_from_distance(20.0)


@pytest.mark.parametrize("bad", [-1.0, math.inf, math.nan])
def test_correlation_rejects_bad_distance(bad: float) -> None:
    """Ensures: negative or non-finite separations raise DomainError."""
    with pytest.raises(DomainError):
        correlation_from_distance(bad)
    with pytest.raises(DomainError):
        SiteGeometry(bad)


# ---- dB algebra ----


@pytest.mark.parametrize(
    ("a_db", "gain"), [(0.0, 1.0), (10.0, 0.1), (3.0103, 0.5), (20.0, 0.01)]
)
def test_attenuation_to_gain(a_db: float, gain: float) -> None:
    """Ensures: dB attenuation maps to the linear power gain."""
    assert attenuation_db_to_gain(a_db) == pytest.approx(gain, rel=1e-5)


def test_gain_attenuation_inverse_on_unit_interval() -> None:
    """Ensures: gain and attenuation conversions invert each other on (0, 1]."""
    g = np.linspace(1e-6, 1.0, 1001)
    back = attenuation_db_to_gain(gain_to_attenuation_db(g))
    np.testing.assert_allclose(back, g, rtol=1e-12)


# ---- Marginal and joint exceedance ----


def test_normal_tail_values() -> None:
    """Ensures: Q(0) = 1/2 and Q(-x) = 1 - Q(x) at one sigma."""
    assert normal_tail(0.0) == pytest.approx(0.5, abs=1e-15)
    assert normal_tail(1.0) == pytest.approx(0.158655253931457, abs=1e-12)
    assert normal_tail(-1.0) == pytest.approx(1.0 - 0.158655253931457, abs=1e-12)


def test_marginal_examples() -> None:
    """Ensures: marginal exceedance hits the median and one-sigma values."""
    params = RainFadeParams(rho=0.3, **STD_NORMAL)
    assert marginal_exceed_prob(params, 1, 1.0) == pytest.approx(0.5, abs=1e-15)
    assert marginal_exceed_prob(params, 2, math.e) == pytest.approx(0.158655, abs=1e-6)
    assert marginal_exceed_prob(params, 1, 0.0) == 1.0
    assert marginal_exceed_prob(params, 1, -5.0) == 1.0


def test_marginal_rejects_non_finite_and_bad_site() -> None:
    """Ensures: an infinite threshold and a third site raise DomainError."""
    params = RainFadeParams(rho=0.3, **STD_NORMAL)
    with pytest.raises(DomainError):
        marginal_exceed_prob(params, 1, math.inf)
    with pytest.raises(DomainError):
        marginal_exceed_prob(params, 3, 1.0)


def test_joint_independent_is_product() -> None:
    """Ensures: rho = 0 factorises the joint exceedance."""
    params = RainFadeParams(m1=-0.2, s1=1.1, m2=0.1, s2=0.8, rho=0.0)
    expected = marginal_exceed_prob(params, 1, 7.0) * marginal_exceed_prob(params, 2, 4.0)
    assert joint_exceed_prob(params, 7.0, 4.0) == pytest.approx(expected, abs=1e-15)


@pytest.mark.parametrize("rho", [0.1, 0.3, 0.5, 0.75, 0.95, 0.999])
def test_joint_matches_orthant_formula(rho: float) -> None:
    """a = 1 dB with m = 0 puts both thresholds at the median: 1/4 + asin(rho)/(2 pi)."""
    params = RainFadeParams(rho=rho, **STD_NORMAL)
    exact = 0.25 + math.asin(rho) / (2.0 * math.pi)
    assert joint_exceed_prob(params, 1.0, 1.0) == pytest.approx(exact, abs=1e-9)


def test_joint_comonotone_limit() -> None:
    """Ensures: rho close to 1 collapses the joint onto the marginal."""
    params = RainFadeParams(rho=1.0 - 1e-6, **STD_NORMAL)
    for a in (0.5, 1.0, 3.0):
        marginal = marginal_exceed_prob(params, 1, a)
        assert abs(joint_exceed_prob(params, a, a) - marginal) < 1e-3


def test_joint_degenerate_thresholds() -> None:
    """Ensures: a non-positive threshold on one site leaves the other marginal."""
    params = RainFadeParams(rho=0.5, **STD_NORMAL)
    assert joint_exceed_prob(params, 0.0, -1.0) == 1.0
    assert joint_exceed_prob(params, 0.0, 2.0) == marginal_exceed_prob(params, 2, 2.0)
    assert joint_exceed_prob(params, 2.0, 0.0) == marginal_exceed_prob(params, 1, 2.0)


def test_joint_rejects_rho_one_and_non_finite() -> None:
    """Ensures: quadrature refuses rho = 1 and NaN thresholds."""
    with pytest.raises(DomainError):
        joint_exceed_prob(RainFadeParams(rho=1.0, **STD_NORMAL), 1.0, 1.0)
    with pytest.raises(DomainError):
        joint_exceed_prob(RainFadeParams(rho=0.5, **STD_NORMAL), math.nan, 1.0)


def test_joint_bounded_by_marginal(fade_ul: RainFadeParams) -> None:
    """Ensures: 0 <= joint <= marginal <= 1 for the reference fade law."""
    for a in (0.1, 1.0, 5.0, 10.0, 20.0, 40.0):
        j = joint_exceed_prob(fade_ul, a, a)
        m = marginal_exceed_prob(fade_ul, 1, a)
        assert 0.0 <= j <= m + 1e-12 <= 1.0 + 1e-12


def test_joint_non_decreasing_in_rho(fade_ul: RainFadeParams) -> None:
    """Ensures: stronger correlation never lowers the joint exceedance."""
    for a in (2.0, 10.0, 18.3):
        values = [joint_exceed_prob(fade_ul.with_rho(r), a, a) for r in (0, 0.25, 0.5, 0.75, 0.95)]
        assert all(x <= y + 1e-12 for x, y in zip(values, values[1:]))


def test_joint_matches_monte_carlo(rng: np.random.Generator) -> None:
    """Joint exceedance against sampled pairs.

    Ensures:
      - quadrature and the sample frequency agree within a few standard errors.
    """
    params = RainFadeParams(rho=0.5, **STD_NORMAL)
    n = 1_000_000
    batch = sample_pairs(params, rng, n)
    for a in (1.0, 2.0):
        hits = np.count_nonzero((batch.a1_db > a) & (batch.a2_db > a))
        p = joint_exceed_prob(params, a, a)
        se = math.sqrt(p * (1.0 - p) / n)
        assert abs(hits / n - p) < 4.0 * se


# ---- Domain types ----


def test_fade_validation() -> None:
    """Ensures: non-positive deviations and rho > 1 are rejected."""
    with pytest.raises(DomainError):
        LognormalFade(0.0, 0.0)
    with pytest.raises(DomainError):
        RainFadeParams(rho=1.2, **STD_NORMAL)
    with pytest.raises(DomainError):
        RainFadeParams(m1=0.0, s1=-1.0, m2=0.0, s2=1.0, rho=0.5)


def test_lognormal_pdf_integrates_to_cdf() -> None:
    """Ensures: the downlink pdf integrates to the exceedance probability."""
    fade = LognormalFade(-1.0, 0.9)
    mass, _ = integrate.quad(fade.pdf, 5.0, np.inf, epsabs=1e-13, epsrel=1e-12)
    assert mass == pytest.approx(fade.exceed_prob(5.0), abs=1e-10)
    assert fade.pdf(0.0) == 0.0


# ---- Sampling ----


def test_sampler_is_deterministic() -> None:
    """Ensures: the same seed reproduces the same attenuation pairs."""
    params = RainFadeParams(rho=0.4, **STD_NORMAL)
    a = sample_pairs(params, np.random.Generator(np.random.PCG64(7)), 1000)
    b = sample_pairs(params, np.random.Generator(np.random.PCG64(7)), 1000)
    np.testing.assert_array_equal(a.a1_db, b.a1_db)
    np.testing.assert_array_equal(a.g2_lin, b.g2_lin)
    assert len(a) == 1000


def test_sampler_independent_case_is_uncorrelated(rng: np.random.Generator) -> None:
    """Ensures: rho = 0 gives uncorrelated log attenuations."""
    batch = sample_pairs(RainFadeParams(rho=0.0, **STD_NORMAL), rng, 1_000_000)
    r = np.corrcoef(np.log(batch.a1_db), np.log(batch.a2_db))[0, 1]
    assert abs(r) < 0.004


def test_sampler_comonotone_limit(rng: np.random.Generator) -> None:
    """Ensures: rho = 1 yields identical attenuations on both sites."""
    near = sample_pairs(RainFadeParams(rho=1.0 - 1e-9, **STD_NORMAL), rng, 100_000)
    assert np.corrcoef(np.log(near.a1_db), np.log(near.a2_db))[0, 1] > 0.99
    exact = sample_pairs(RainFadeParams(rho=1.0, **STD_NORMAL), rng, 1000)
    np.testing.assert_array_equal(exact.a1_db, exact.a2_db)


def test_sampler_moments(fade_ul: RainFadeParams, rng: np.random.Generator) -> None:
    """Ensures: log attenuations carry the configured means, variances and rho."""
    n = 1_000_000
    batch = sample_pairs(fade_ul, rng, n)
    for a, m, s in ((batch.a1_db, fade_ul.m1, fade_ul.s1), (batch.a2_db, fade_ul.m2, fade_ul.s2)):
        la = np.log(a)
        assert abs(la.mean() - m) < 5.0 * s / math.sqrt(n)
        assert abs(la.var() - s * s) < 5.0 * s * s * math.sqrt(2.0 / n)
    r = np.corrcoef(np.log(batch.a1_db), np.log(batch.a2_db))[0, 1]
    assert abs(r - fade_ul.rho) < 0.005


def test_sample_pair_and_gain_relation(fade_ul: RainFadeParams, rng: np.random.Generator) -> None:
    """Ensures: one sampled pair has positive fades and matching linear gains; n = 0 raises."""
    s = sample_pair(fade_ul, rng)
    assert s.a1_db > 0.0 and s.a2_db > 0.0
    assert s.g1_lin == pytest.approx(10.0 ** (-s.a1_db / 10.0), rel=1e-12)
    with pytest.raises(DomainError):
        sample_pairs(fade_ul, rng, 0)
