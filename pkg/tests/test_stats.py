import math

import numpy as np
import pytest
from scipy import integrate
from scipy.stats import norm

from breuer_major import stats


def tv_oracle_normal(mu, sigma):
    # exact TV between N(mu, sigma^2) and N(0, 1) by adaptive integration
    f = lambda x: 0.5 * abs(norm.pdf(x, loc=mu, scale=sigma) - norm.pdf(x))
    val, _ = integrate.quad(f, -40, 40, limit=400)
    return val


def test_tv_self_distance():
    samples = np.random.default_rng(0).standard_normal(100_000)
    est = stats.tv_estimate(samples, seed=1)
    assert est.value <= 0.02
    assert est.ci_low <= 0.01
    assert est.kind == "total_variation"
    assert 0.0 <= est.ci_low <= est.value <= est.ci_high <= 1.0


def test_tv_shifted_normal():
    # closed form: 2 Phi(1/2) - 1
    samples = np.random.default_rng(1).standard_normal(100_000) + 1.0
    est = stats.tv_estimate(samples, seed=2)
    assert abs(est.value - 0.38292492254802624) <= 0.02


def test_tv_scaled_normal():
    oracle = tv_oracle_normal(0.0, 2.0)
    assert abs(oracle - 0.3226745689511262) < 1e-8
    samples = 2.0 * np.random.default_rng(2).standard_normal(100_000)
    est = stats.tv_estimate(samples, seed=3)
    assert abs(est.value - oracle) <= 0.02


def test_tv_needs_enough_samples():
    with pytest.raises(ValueError, match="at least"):
        stats.tv_estimate(np.zeros(10))


def test_tv_permutation_invariant():
    rng = np.random.default_rng(3)
    samples = rng.standard_normal(5000)
    a = stats.tv_estimate(samples, seed=7)
    b = stats.tv_estimate(rng.permutation(samples), seed=7)
    assert a.value == b.value


def test_tv_bias_bound_is_moderate():
    samples = np.random.default_rng(4).standard_normal(10_000)
    est = stats.tv_estimate(samples, seed=0)
    assert 0.0 < est.bias_bound < 0.2


def test_kolmogorov_self():
    samples = np.random.default_rng(5).standard_normal(100_000)
    est = stats.kolmogorov_estimate(samples)
    assert est.value <= 0.015
    assert est.bias_bound == 0.0


def test_kolmogorov_shifted():
    # optimum at x = 0.25: Phi(0.25) - Phi(-0.25)
    samples = np.random.default_rng(6).standard_normal(100_000) + 0.5
    est = stats.kolmogorov_estimate(samples)
    assert abs(est.value - 0.1974126513658474) <= 0.02


def test_kolmogorov_degenerate():
    est = stats.kolmogorov_estimate(np.zeros(5000))
    assert abs(est.value - 0.5) < 1e-12


def test_tv_dominates_kolmogorov():
    for seed in range(4):
        samples = np.random.default_rng(seed).standard_normal(20_000) * 1.3
        tv = stats.tv_estimate(samples, seed=seed)
        ks = stats.kolmogorov_estimate(samples)
        noise = (tv.ci_high - tv.ci_low) + (ks.ci_high - ks.value)
        assert tv.value >= ks.value - 2.0 * noise


def test_self_distance_shrinks_with_doubling():
    # monotone consistency in expectation, one-sided tolerance over seeds
    small, large = [], []
    for seed in range(5):
        rng = np.random.default_rng(100 + seed)
        x = rng.standard_normal(40_000)
        small.append(stats.tv_estimate(x[:20_000], seed=seed).value)
        large.append(stats.tv_estimate(x, seed=seed).value)
    assert np.mean(large) <= np.mean(small) + 0.002


def test_bootstrap_constant():
    lo, hi = stats.bootstrap_ci(np.mean, np.full(500, 2.5), seed=1)
    assert lo == hi == 2.5


def test_bootstrap_mean_width():
    samples = np.random.default_rng(8).standard_normal(10_000)
    lo, hi = stats.bootstrap_ci(np.mean, samples, resamples=400, seed=2)
    width = hi - lo
    expect = 4.0 / math.sqrt(10_000)
    assert abs(width - expect) <= 0.3 * expect


def test_bootstrap_reproducible():
    samples = np.random.default_rng(9).standard_normal(2000)
    a = stats.bootstrap_ci(np.median, samples, seed=5)
    b = stats.bootstrap_ci(np.median, samples, seed=5)
    assert a == b
