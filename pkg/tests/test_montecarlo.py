import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from conftest import white_gaussian
from robust_wald.detector import DegenerateStatisticError, DetectorConfig
from robust_wald.disturbance import ArSpec
from robust_wald.geometry import ArrayConfig
from robust_wald.montecarlo import (
    SAMPLE_CAP,
    Scenario,
    derive_seed,
    ks_distance,
    predict,
    run_trials,
    simulate,
    splitmix64,
    sweep,
    trial_stream,
    wilson_interval,
)
from robust_wald.theory import asymptotic_pd, chi2_2_cdf, threshold_for_pfa


def white_scenario(lag=0, **kw):
    return Scenario("white", white_gaussian(), detector=DetectorConfig(truncation_lag=lag), **kw)


# -- RNG contract -------------------------------------------------------------

def test_splitmix64_reference_values():
    # first outputs of the reference SplitMix64 generator seeded with 0 are
    # finaliser(k * golden) for k = 1, 2, ...
    g = 0x9E3779B97F4A7C15
    assert splitmix64(0) == 0xE220A8397B1DCDAF
    assert splitmix64(g) == 0x6E789E6AA1B965F4
    assert splitmix64(2**64 + 5) == splitmix64(5)


def test_trial_streams_distinct_and_reproducible():
    a = trial_stream(7, 0).standard_normal(4)
    np.testing.assert_array_equal(a, trial_stream(7, 0).standard_normal(4))
    assert not np.array_equal(a, trial_stream(7, 1).standard_normal(4))
    assert not np.array_equal(a, trial_stream(8, 0).standard_normal(4))


def test_derive_seed_distinct():
    seeds = {derive_seed(1, k) for k in range(1000)}
    assert len(seeds) == 1000
    assert derive_seed(1, 5) == derive_seed(1, 5)


# -- Wilson and KS --------------------------------------------------------------

def test_wilson_examples():
    lo, hi = wilson_interval(50, 100)
    assert lo == pytest.approx(0.4038, abs=1e-3)
    assert hi == pytest.approx(0.5962, abs=1e-3)
    lo, hi = wilson_interval(0, 1)
    assert lo == 0.0 and hi < 1.0
    lo, hi = wilson_interval(20, 20)
    assert hi == 1.0 and lo > 0.0
    with pytest.raises(ValueError):
        wilson_interval(3, 2)
    with pytest.raises(ValueError):
        wilson_interval(0, 0)


@settings(max_examples=300)
@given(trials=st.integers(1, 10**7), frac=st.floats(0, 1))
def test_wilson_contains_point_estimate(trials, frac):
    k = int(round(frac * trials))
    lo, hi = wilson_interval(k, trials)
    assert 0.0 <= lo <= k / trials <= hi <= 1.0


def test_wilson_matches_statsmodels_free_formula():
    # closed form with z = 1.959964
    z, k, n = 1.959964, 13, 250
    p = k / n
    c = (p + z * z / (2 * n)) / (1 + z * z / n)
    h = z / (1 + z * z / n) * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n))
    lo, hi = wilson_interval(k, n)
    assert lo == pytest.approx(c - h, abs=1e-6)
    assert hi == pytest.approx(c + h, abs=1e-6)


def test_ks_examples():
    m = 400
    q = stats.chi2(2).ppf((np.arange(1, m + 1) - 0.5) / m)
    assert ks_distance(q, chi2_2_cdf) == pytest.approx(0.5 / m, rel=1e-6)
    assert ks_distance(np.full(50, 3.0), chi2_2_cdf) >= 0.5
    with pytest.raises(ValueError):
        ks_distance([], chi2_2_cdf)


def test_ks_matches_scipy():
    x = np.random.default_rng(1).exponential(2.0, 5000)
    assert ks_distance(x, chi2_2_cdf) == pytest.approx(stats.kstest(x, "chi2", args=(2,)).statistic, rel=1e-12)


def test_ks_exact_samples_below_kolmogorov_bound():
    m = 20000
    x = 2.0 * np.random.default_rng(2).exponential(1.0, m)
    assert ks_distance(x, chi2_2_cdf) < 1.63 / math.sqrt(m)


# -- Scenario -------------------------------------------------------------------

def test_scenario_requires_unit_power_for_snr():
    with pytest.raises(ValueError, match="unit-power"):
        Scenario("ar", ArSpec([0.5]), snr_db=0.0)
    s = white_scenario(snr_db=-6.0)
    assert s.alpha == pytest.approx(10 ** (-0.3))
    assert white_scenario().alpha == 0.0


def test_scenario_steering_with_array():
    s = white_scenario(array=ArrayConfig(4, 8), nu=0.1)
    assert len(s.steering(32)) == 32
    with pytest.raises(ValueError):
        s.steering(16)


# -- run_trials -------------------------------------------------------------------

def test_single_trial_bit_identical(scenario1):
    a = run_trials(scenario1, 64, 1, 99)
    b = run_trials(scenario1, 64, 1, 99)
    assert a == b
    assert a.trials == 1 and a.detections in (0, 1)


def test_results_independent_of_worker_count(scenario1):
    s = scenario1.with_(nu=0.2)
    a = run_trials(s, 256, 600, 5, workers=1, retain_samples=True)
    b = run_trials(s, 256, 600, 5, workers=2, retain_samples=True)
    assert a == b
    np.testing.assert_array_equal(a.samples, b.samples)


def test_trial_outcome_depends_only_on_index(scenario1):
    full = simulate(scenario1, 128, 300, 17).statistic
    part = simulate(scenario1, 128, 130, 17).statistic
    np.testing.assert_array_equal(full[:130], part)


def test_result_invariants(scenario2):
    r = run_trials(scenario2, 128, 500, 3)
    assert 0 <= r.detections <= r.trials
    assert r.ci_low <= r.p_hat <= r.ci_high
    assert r.ks_to_chi2 is not None and 0 <= r.ks_to_chi2 <= 1
    assert r.predicted.pd == pytest.approx(1e-2)
    assert r.samples is None


def test_h1_result_has_no_ks_and_theory_pd():
    s = white_scenario(lag=1, snr_db=-15.0)
    r = run_trials(s, 256, 200, 4)
    assert r.ks_to_chi2 is None
    varsigma = 2 * 10 ** (-1.5) * 256
    assert r.predicted.varsigma == pytest.approx(varsigma, rel=1e-12)
    assert r.predicted.pd == pytest.approx(asymptotic_pd(varsigma, threshold_for_pfa(1e-2)))


def test_argument_validation(scenario1):
    with pytest.raises(ValueError):
        run_trials(scenario1, 1, 10, 0)
    with pytest.raises(ValueError):
        run_trials(scenario1, 64, 0, 0)


def test_degenerate_policies():
    # N = 2 with l = 1: the band covers the full outer product and
    # v^H Gamma v = |v^H c_hat|^2 = 0 for every trial
    count = white_scenario(lag=1)
    r = run_trials(count, 2, 50, 0)
    assert r.degenerates == 50 and r.detections == 0 and r.p_hat == 0.0
    strict = count.with_(detector=DetectorConfig(truncation_lag=1, degenerate_policy="error"))
    with pytest.raises(DegenerateStatisticError):
        run_trials(strict, 2, 50, 0)


def test_sample_retention_cap(monkeypatch, scenario1):
    import robust_wald.montecarlo as mc

    monkeypatch.setattr(mc, "SAMPLE_CAP", 100)
    a = mc.run_trials(scenario1, 32, 700, 8, retain_samples=True)
    b = mc.run_trials(scenario1, 32, 700, 8, workers=2, retain_samples=True)
    assert a.samples.shape == (100,)
    np.testing.assert_array_equal(a.samples, b.samples)
    assert SAMPLE_CAP == 100_000


@pytest.mark.slow
def test_h0_white_gaussian_pfa_and_ks():
    r = run_trials(white_scenario(lag=0), 4096, 10**5, 2718)
    assert abs(r.p_hat - 0.01) <= 3 * math.sqrt(0.01 * 0.99 / 1e5)
    assert r.ks_to_chi2 < 0.01
    assert r.degenerates == 0


def test_h1_white_gaussian_matches_marcum():
    snr = -14.0
    s = white_scenario(lag=0, snr_db=snr)
    r = run_trials(s, 1024, 4000, 1618)
    pd = asymptotic_pd(2 * 10 ** (snr / 10) * 1024, threshold_for_pfa(1e-2))
    assert abs(r.p_hat - pd) < 3 * math.sqrt(pd * (1 - pd) / r.trials)


def test_predict_uses_full_autocovariance(scenario1):
    s = scenario1.with_(snr_db=-10.0, nu=0.2)
    pred = predict(s, 512)
    assert 0 < pred.varsigma
    assert pred.pd > pred.pfa


# -- sweep -------------------------------------------------------------------------

def test_sweep_single_point(scenario1):
    res = sweep(scenario1, [64], 10, 1)
    assert len(res) == 1 and res[0].n == 64 and res[0].trials == 10
    assert res[0].seed == derive_seed(1, 64)


def test_sweep_ordering_and_validation(scenario1):
    res = sweep(scenario1, [32, 64, 128], 20, 2)
    assert [r.n for r in res] == [32, 64, 128]
    assert len({r.seed for r in res}) == 3
    with pytest.raises(ValueError):
        sweep(scenario1, [], 10, 1)
    with pytest.raises(ValueError):
        sweep(scenario1, [64, 32], 10, 1)
    with pytest.raises(ValueError):
        sweep(scenario1, [64, 64], 10, 1)
