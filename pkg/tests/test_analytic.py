"""Closed-form analytics against independent oracles.

Expected values were frozen from 40-digit arithmetic on the defining series
and densities; Monte Carlo oracles re-derive the exceedance probabilities
from raw draws so they never share code with the functions under test.
"""

import math

import numpy as np
import pytest
from scipy import integrate, special

from obsense.analytic import (
    cfar_threshold,
    exact_variances,
    gamma_tail,
    gaussian_tail,
    onebit_variances,
    pd_exact,
    pd_normal_approx,
    pfa_exact,
    pfa_normal_approx,
    roc_analytic,
    statistic_cdf,
    statistic_pdf,
    threshold_for_pfa,
    variances_for,
)
from obsense.model import SensingConfig

ORACLE_DRAWS = 10_000_000


def _mc_exceedance(rng, captures, bin_var, threshold, draws=ORACLE_DRAWS):
    """Brute-force exceedance rate of the mean of `captures` squared
    complex-Gaussian magnitudes, drawn as unit-rate exponentials."""
    hits = 0
    chunk = 2_000_000
    remaining = draws
    while remaining:
        batch = min(chunk, remaining)
        z = rng.exponential(scale=bin_var, size=(batch, captures)).mean(axis=1)
        hits += int(np.count_nonzero(z > threshold))
        remaining -= batch
    return hits / draws


def _binomial_sigma(p, draws=ORACLE_DRAWS):
    return math.sqrt(p * (1.0 - p) / draws)


# --- tail series -------------------------------------------------------------


def test_gamma_tail_boundaries():
    for captures in (1, 2, 8, 64):
        assert gamma_tail(captures, 0.0) == 1.0
    assert gaussian_tail(0.0) == pytest.approx(0.5, rel=0, abs=0)


def test_gamma_tail_monotone_in_x_and_captures():
    xs = np.linspace(0.0, 40.0, 200)
    for captures in (1, 3, 8):
        vals = [gamma_tail(captures, x) for x in xs]
        assert all(0.0 <= v <= 1.0 for v in vals)
        assert all(a >= b for a, b in zip(vals, vals[1:]))
    for x in (0.5, 2.0, 10.0):
        by_captures = [gamma_tail(c, x) for c in range(1, 30)]
        assert all(a <= b for a, b in zip(by_captures, by_captures[1:]))
        # strictly increasing until rounding saturates the tail at 1
        assert all(
            a < b for a, b in zip(by_captures, by_captures[1:]) if b < 1.0 - 1e-9
        )


def test_gamma_tail_matches_scipy():
    rng = np.random.default_rng(5)
    for _ in range(300):
        captures = int(rng.integers(1, 200))
        x = float(rng.uniform(0.0, 400.0))
        ours = gamma_tail(captures, x)
        ref = special.gammaincc(captures, x)
        assert ours == pytest.approx(ref, rel=1e-12, abs=1e-300)


def test_gamma_tail_log_space_no_overflow():
    # L=1024 at argument 2000; frozen from 40-digit summation
    value = gamma_tail(1024, 2000.0)
    assert math.isfinite(value)
    assert value == pytest.approx(8.9497827742640286e-129, rel=1e-10)
    assert value == pytest.approx(special.gammaincc(1024, 2000.0), rel=1e-10)


def test_gamma_tail_rejects_bad_arguments():
    with pytest.raises(ValueError, match="non-negative"):
        gamma_tail(4, -0.1)
    with pytest.raises(ValueError, match="avg_captures"):
        gamma_tail(0, 1.0)
    with pytest.raises(ValueError, match="integer"):
        gamma_tail(2.5, 1.0)


# --- pdf / cdf ---------------------------------------------------------------


def test_statistic_pdf_known_values():
    assert statistic_pdf(0.0, 1, 1.0) == pytest.approx(1.0, rel=0, abs=0)
    assert statistic_pdf(1.0, 1, 1.0) == pytest.approx(math.exp(-1.0), rel=1e-14)
    assert statistic_pdf(0.0, 4, 1.0) == 0.0
    assert statistic_pdf(1.0, 8, 1.0) == pytest.approx(1.1166922556047754, rel=1e-12)


def test_statistic_pdf_matches_cdf_derivative():
    step = 1e-5
    for captures in (2, 8):
        upper = statistic_cdf(1.0 + step, captures, 1.0)
        lower = statistic_cdf(1.0 - step, captures, 1.0)
        assert statistic_pdf(1.0, captures, 1.0) == pytest.approx(
            (upper - lower) / (2.0 * step), abs=1e-8
        )


def test_statistic_cdf_known_values():
    assert statistic_cdf(0.0, 4, 1.0) == 0.0
    assert statistic_cdf(1.0, 1, 1.0) == pytest.approx(1.0 - math.exp(-1.0), rel=1e-14)
    expected = 1.0 - math.exp(-4.0) * (71.0 / 3.0)
    assert statistic_cdf(1.0, 4, 1.0) == pytest.approx(expected, rel=1e-14)
    assert statistic_cdf(1.0, 4, 1.0) == pytest.approx(0.56652987963329107, rel=1e-12)


def test_statistic_cdf_against_monte_carlo():
    rng = np.random.default_rng(2024)
    exceed = _mc_exceedance(rng, captures=4, bin_var=1.0, threshold=1.0)
    estimate = 1.0 - exceed
    target = statistic_cdf(1.0, 4, 1.0)
    assert abs(estimate - target) <= 3.0 * _binomial_sigma(target)


def test_pdf_integrates_to_cdf():
    for captures in (1, 2, 4, 8, 64):
        for z in (0.4, 1.0, 2.5):
            area, err = integrate.quad(
                statistic_pdf, 0.0, z, args=(captures, 1.0), limit=200
            )
            assert abs(area - statistic_cdf(z, captures, 1.0)) <= 1e-8


def test_pdf_cdf_reject_bad_arguments():
    with pytest.raises(ValueError, match="non-negative"):
        statistic_pdf(-1.0, 4, 1.0)
    with pytest.raises(ValueError, match="bin_var"):
        statistic_pdf(1.0, 4, 0.0)
    with pytest.raises(ValueError, match="non-negative"):
        statistic_cdf(-1.0, 4, 1.0)
    with pytest.raises(ValueError, match="bin_var"):
        statistic_cdf(1.0, 4, -2.0)


# --- false alarm / detection -------------------------------------------------


def test_pfa_exact_known_values():
    assert pfa_exact(0.0, 4, 1.0) == 1.0
    assert pfa_exact(1.0, 1, 1.0) == pytest.approx(math.exp(-1.0), rel=1e-14)
    assert pfa_exact(1.0, 4, 1.0) == pytest.approx(math.exp(-4.0) * 71.0 / 3.0, rel=1e-14)
    assert pfa_exact(1.0, 4, 1.0) == pytest.approx(0.43347012036670893, rel=1e-12)


def test_pfa_exact_against_monte_carlo():
    rng = np.random.default_rng(77)
    exceed = _mc_exceedance(rng, captures=4, bin_var=1.0, threshold=1.0)
    target = pfa_exact(1.0, 4, 1.0)
    assert abs(exceed - target) <= 3.0 * _binomial_sigma(target)


def test_pd_reduces_to_pfa_without_signal():
    for lam in (0.0, 0.3, 1.0, 2.7):
        for captures in (1, 4, 16):
            assert pd_exact(lam, captures, 1.0) == pfa_exact(lam, captures, 1.0)


def test_pd_exact_known_values():
    assert pd_exact(1.0, 1, 2.0) == pytest.approx(math.exp(-0.5), rel=1e-14)
    # snr 1 -> occupied variance 2, threshold 1.5: frozen from the series
    assert pd_exact(1.5, 8, 2.0) == pytest.approx(0.74397976045371701, rel=1e-12)


def test_pd_exact_against_monte_carlo():
    rng = np.random.default_rng(78)
    exceed = _mc_exceedance(rng, captures=8, bin_var=2.0, threshold=1.5)
    target = pd_exact(1.5, 8, 2.0)
    assert abs(exceed - target) <= 3.0 * _binomial_sigma(target)


def test_pfa_strictly_decreasing_to_zero():
    lams = np.linspace(0.0, 30.0, 100)
    vals = [pfa_exact(lam, 4, 1.0) for lam in lams]
    assert all(a > b for a, b in zip(vals, vals[1:]))
    assert vals[-1] < 1e-20


def test_detection_dominates_false_alarm():
    rng = np.random.default_rng(9)
    for _ in range(200):
        captures = int(rng.integers(1, 40))
        lam = float(rng.uniform(0.0, 5.0))
        var0 = float(rng.uniform(0.2, 2.0))
        var1 = var0 * float(rng.uniform(1.0, 4.0))
        # dominance holds mathematically; allow series rounding near 1
        assert pd_exact(lam, captures, var1) >= pfa_exact(lam, captures, var0) - 1e-12


# --- threshold inversion -----------------------------------------------------


def test_threshold_boundary_and_closed_form():
    assert threshold_for_pfa(1.0, 4, 1.0) == 0.0
    assert threshold_for_pfa(0.1, 1, 1.0) == pytest.approx(2.3025850929940457, rel=1e-12)


def test_threshold_round_trip_tight():
    for target in np.arange(0.01, 1.0, 0.01):
        lam = threshold_for_pfa(float(target), 8, 1.0)
        assert abs(pfa_exact(lam, 8, 1.0) - target) <= 1e-12


def test_threshold_round_trip_wide_range():
    rng = np.random.default_rng(31)
    targets = np.concatenate([[1e-4, 1e-3, 1.0], 10 ** rng.uniform(-4, 0, 100)])
    for captures in (1, 4, 32):
        for var in (0.5, 1.0, 3.0):
            for target in targets:
                lam = threshold_for_pfa(float(target), captures, var)
                assert abs(pfa_exact(lam, captures, var) - target) <= 1e-10


def test_threshold_rejects_bad_targets():
    for bad in (0.0, -0.1, 1.0001):
        with pytest.raises(ValueError, match="target"):
            threshold_for_pfa(bad, 4, 1.0)


# --- one-bit leakage variances -----------------------------------------------


def test_onebit_variances_no_signal_or_no_occupancy():
    hv = onebit_variances(0.0, 100, 1024)
    assert hv.var_h0 == 1.0 and hv.var_h1 == 1.0
    assert onebit_variances(1.0, 0, 1024).var_h0 == 1.0


def test_onebit_variances_frozen_values():
    hv = onebit_variances(1.0, 100, 1024)
    assert hv.var_h0 == pytest.approx(1.0359257266768987, rel=1e-12)
    assert hv.var_h1 == pytest.approx(1.6680462855054563, rel=1e-12)
    assert hv.model == "one-bit-leakage"


def test_onebit_power_conservation_randomized():
    rng = np.random.default_rng(123)
    for _ in range(10_000):
        n = int(rng.integers(2, 4096))
        m = int(rng.integers(0, n))
        snr = float(10 ** rng.uniform(-3, 3))
        alpha = float(rng.uniform(1e-6, 1.0))
        hv = onebit_variances(snr, m, n, alpha)
        total = (n - m) * hv.var_h0 + m * hv.var_h1
        expected = n + m * snr
        assert abs(total - expected) <= 1e-12 * max(1.0, abs(expected))


def test_onebit_variances_rejects_bad_arguments():
    with pytest.raises(ValueError, match="m_occupied"):
        onebit_variances(1.0, 1024, 1024)
    with pytest.raises(ValueError, match="alpha"):
        onebit_variances(1.0, 100, 1024, alpha=0.0)
    with pytest.raises(ValueError, match="snr"):
        onebit_variances(-0.5, 100, 1024)


# --- normal approximation ----------------------------------------------------


def test_normal_approx_at_the_mean():
    for captures in (1, 8, 64):
        assert pfa_normal_approx(2.0, captures, 2.0) == pytest.approx(0.5, rel=1e-14)
        assert pd_normal_approx(2.0, captures, 2.0) == pytest.approx(0.5, rel=1e-14)


def test_normal_approx_known_value():
    assert pfa_normal_approx(1.5, 8, 1.0) == pytest.approx(0.078649603525142565, rel=1e-12)


def test_normal_approx_gap_shrinks_with_averaging():
    lam = 1.2
    gap4 = abs(pfa_normal_approx(lam, 4, 1.0) - pfa_exact(lam, 4, 1.0))
    gap64 = abs(pfa_normal_approx(lam, 64, 1.0) - pfa_exact(lam, 64, 1.0))
    assert gap64 < gap4


# --- scenario-level helpers --------------------------------------------------


def test_variances_for_models():
    cfg = SensingConfig.make(1024, 100, 8, noise_var=2.0, snr=1.0)
    exact = variances_for(cfg, "exact")
    assert exact.var_h0 == pytest.approx(2.0) and exact.var_h1 == pytest.approx(4.0)
    onebit = variances_for(cfg, "onebit")
    assert onebit.var_h0 == pytest.approx(2.0 * 1.0359257266768987, rel=1e-12)
    with pytest.raises(ValueError, match="model"):
        variances_for(cfg, "hexact")
    assert exact_variances(3.0).var_h1 == pytest.approx(4.0)


def test_cfar_threshold_bases():
    cfg = SensingConfig.make(1024, 100, 8, snr_db=0.0, quantizer="one-bit")
    lam_q = cfar_threshold(cfg, 0.1)
    lam_raw = cfar_threshold(cfg, 0.1, basis="raw")
    assert lam_q > lam_raw  # leakage raises the vacant variance
    assert lam_raw == pytest.approx(threshold_for_pfa(0.1, 8, 1.0), rel=1e-12)
    plain = cfg.with_updates(quantizer="none")
    assert cfar_threshold(plain, 0.1) == pytest.approx(lam_raw, rel=1e-12)
    with pytest.raises(ValueError, match="basis"):
        cfar_threshold(cfg, 0.1, basis="both")


def test_roc_analytic_curves():
    grid = np.linspace(0.0, 3.0, 40)
    silent = SensingConfig.make(1024, 100, 8, snr=0.0)
    diag = roc_analytic(silent, "exact", grid)
    assert np.allclose(diag.pd, diag.pfa, rtol=0, atol=0)

    cfg = SensingConfig.make(1024, 100, 8, snr_db=0.0)
    exact = roc_analytic(cfg, "exact", grid)
    onebit = roc_analytic(cfg, "onebit", grid)
    # at matched false-alarm rates the one-bit curve sits below the exact one
    interior = (exact.pfa > 1e-6) & (exact.pfa < 1 - 1e-6)
    pd_onebit_at = np.interp(exact.pfa[interior][::-1], onebit.pfa[::-1], onebit.pd[::-1])[::-1]
    assert np.all(pd_onebit_at <= exact.pd[interior] + 1e-12)
    assert np.any(pd_onebit_at < exact.pd[interior] - 1e-3)

    for curve in (exact, onebit, roc_analytic(cfg, "normal", grid)):
        assert np.all(np.diff(curve.pfa) <= 1e-15)
        assert np.all(np.diff(curve.pd) <= 1e-15)

    with pytest.raises(ValueError, match="model"):
        roc_analytic(cfg, "exactish", grid)
    with pytest.raises(ValueError, match="strictly increasing"):
        roc_analytic(cfg, "exact", np.array([1.0, 1.0]))
    with pytest.raises(ValueError, match="non-negative"):
        roc_analytic(cfg, "exact", np.array([-1.0, 1.0]))
