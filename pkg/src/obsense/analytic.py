"""Closed-form detection analytics for the averaged-energy statistic.

Each sub-band's decision statistic is the mean of ``avg_captures`` squared
magnitudes of zero-mean complex Gaussian spectrum bins, which makes it a
Gamma variable with integer shape L and scale ``bin_var / L``.  Everything
here follows from that law: exact false-alarm and detection probabilities,
their Gaussian (central-limit) approximations, threshold inversion for
constant-false-alarm operation, and the variance bookkeeping for the
one-bit quantized front end, whose only effect on the statistic is a
redistribution of occupied-band power across the whole band.

All functions are pure and safe for concurrent callers.
"""

from __future__ import annotations

import math

import numpy as np

from obsense.model import (
    ALPHA_DEFAULT,
    HypothesisVariances,
    RocCurve,
    SensingConfig,
)

# Above this argument the leading e^-x underflows and the tail series must
# be summed in log space.
_LOG_SPACE_CUTOVER = 700.0

ANALYTIC_MODELS = ("exact", "normal", "onebit")

_PROVENANCE_FOR_MODEL = {
    "exact": "analytic-exact",
    "normal": "analytic-normal",
    "onebit": "analytic-onebit",
}


def _check_captures(avg_captures) -> int:
    """The tail series uses factorials, so only integer capture counts exist."""
    if isinstance(avg_captures, float) and not avg_captures.is_integer():
        raise ValueError(f"avg_captures must be an integer, got {avg_captures!r}")
    count = int(avg_captures)
    if count < 1:
        raise ValueError(f"avg_captures must be at least 1, got {avg_captures!r}")
    return count


def gamma_tail(avg_captures: int, x: float) -> float:
    """Survival function sum_{k<L} x^k e^-x / k! of a unit-scale Gamma(L).

    Terms are built by recursion so each stays a Poisson probability in
    [0, 1]; once x passes the underflow cutover the sum switches to
    log-sum-exp, which keeps e.g. L=1024 at x=2000 finite and correct.
    """
    count = _check_captures(avg_captures)
    if x < 0.0:
        raise ValueError(f"tail argument must be non-negative, got {x!r}")
    if x == 0.0:
        return 1.0
    if x <= _LOG_SPACE_CUTOVER:
        term = math.exp(-x)
        total = term
        for k in range(1, count):
            term *= x / k
            total += term
        return min(total, 1.0)
    log_x = math.log(x)
    logs = [k * log_x - x - math.lgamma(k + 1) for k in range(count)]
    peak = max(logs)
    if peak == -math.inf:
        return 0.0
    spread = sum(math.exp(v - peak) for v in logs)
    return math.exp(peak + math.log(spread))


def gaussian_tail(x: float) -> float:
    """Standard normal upper tail Q(x) = P(Z > x)."""
    return 0.5 * math.erfc(x / math.sqrt(2.0))


def _check_positive_var(value: float, name: str) -> float:
    if not value > 0.0:
        raise ValueError(f"{name} must be positive, got {value!r}")
    return float(value)


def statistic_pdf(value: float, avg_captures: int, bin_var: float) -> float:
    """Density of the per-sub-band decision statistic at ``value``.

    The statistic averages L squared bin magnitudes, i.e. Gamma with shape
    L and scale ``bin_var / L``; evaluated in log space so large L cannot
    overflow the L-th power of the scale.
    """
    count = _check_captures(avg_captures)
    scale = _check_positive_var(bin_var, "bin_var") / count
    if value < 0.0:
        raise ValueError(f"statistic value must be non-negative, got {value!r}")
    if value == 0.0:
        return 1.0 / scale if count == 1 else 0.0
    log_pdf = (
        (count - 1) * math.log(value)
        - value / scale
        - count * math.log(scale)
        - math.lgamma(count)
    )
    return math.exp(log_pdf)


def statistic_cdf(value: float, avg_captures: int, bin_var: float) -> float:
    """Distribution function of the decision statistic, 1 - gamma_tail."""
    count = _check_captures(avg_captures)
    var = _check_positive_var(bin_var, "bin_var")
    if value < 0.0:
        raise ValueError(f"statistic value must be non-negative, got {value!r}")
    return 1.0 - gamma_tail(count, value * count / var)


def pfa_exact(threshold: float, avg_captures: int, noise_var: float) -> float:
    """Probability a vacant sub-band's statistic exceeds ``threshold``."""
    count = _check_captures(avg_captures)
    var = _check_positive_var(noise_var, "noise_var")
    if threshold < 0.0:
        raise ValueError(f"threshold must be non-negative, got {threshold!r}")
    return gamma_tail(count, threshold * count / var)


def pd_exact(threshold: float, avg_captures: int, occupied_var: float) -> float:
    """Probability an occupied sub-band's statistic exceeds ``threshold``.

    Identical tail law as the false alarm, with the occupied-hypothesis bin
    variance in place of the vacant one.
    """
    count = _check_captures(avg_captures)
    var = _check_positive_var(occupied_var, "occupied_var")
    if threshold < 0.0:
        raise ValueError(f"threshold must be non-negative, got {threshold!r}")
    return gamma_tail(count, threshold * count / var)


def pfa_normal_approx(threshold: float, avg_captures: int, vacant_var: float) -> float:
    """Central-limit approximation of the false-alarm probability.

    The statistic has mean ``vacant_var`` and variance ``vacant_var**2 / L``
    (mean of L squared complex-Gaussian magnitudes), so the tail is
    Q((threshold/var - 1) * sqrt(L)).
    """
    count = _check_captures(avg_captures)
    var = _check_positive_var(vacant_var, "vacant_var")
    if threshold < 0.0:
        raise ValueError(f"threshold must be non-negative, got {threshold!r}")
    return gaussian_tail((threshold / var - 1.0) * math.sqrt(count))


def pd_normal_approx(threshold: float, avg_captures: int, occupied_var: float) -> float:
    """Central-limit approximation of the detection probability."""
    count = _check_captures(avg_captures)
    var = _check_positive_var(occupied_var, "occupied_var")
    if threshold < 0.0:
        raise ValueError(f"threshold must be non-negative, got {threshold!r}")
    return gaussian_tail((threshold / var - 1.0) * math.sqrt(count))


def threshold_for_pfa(target: float, avg_captures: int, vacant_var: float) -> float:
    """Invert the false-alarm curve: the threshold with pfa_exact == target.

    The tail is strictly decreasing in the threshold, so a doubling search
    brackets the root and plain bisection closes in; derivative-free keeps
    this robust at extreme targets.
    """
    count = _check_captures(avg_captures)
    var = _check_positive_var(vacant_var, "vacant_var")
    if not 0.0 < target <= 1.0:
        raise ValueError(f"target false-alarm rate must lie in (0, 1], got {target!r}")
    if target == 1.0:
        return 0.0
    hi = var
    while pfa_exact(hi, count, var) >= target:
        hi *= 2.0
        if hi > 1e300:
            raise ValueError(f"no finite threshold reaches target {target!r}")
    lo = 0.0
    for _ in range(200):
        if hi - lo <= 1e-14 * max(hi, 1.0):
            break
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if pfa_exact(mid, count, var) >= target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def onebit_variances(
    snr: float,
    m_occupied: int,
    n_subbands: int,
    alpha: float = ALPHA_DEFAULT,
) -> HypothesisVariances:
    """Hypothesis variances after one-bit capture, in units of the noise power.

    Sign capture preserves total power but smears a fraction ``alpha`` of
    the occupied-band signal power uniformly over all N bins.  A vacant bin
    then carries 1 + alpha*snr*M/N and an occupied bin gives up alpha*snr of
    its own power to the pool while keeping the rest:

        var_h0 = 1 + alpha*snr*M/N
        var_h1 = 1 + snr - alpha*snr + alpha*snr*M/N

    which conserves (N-M)*var_h0 + M*var_h1 = N + M*snr exactly.
    """
    if snr < 0.0:
        raise ValueError(f"snr must be non-negative, got {snr!r}")
    if not 0.0 < alpha <= 1.0:
        raise ValueError(f"alpha must lie in (0, 1], got {alpha!r}")
    if n_subbands < 1:
        raise ValueError(f"n_subbands must be positive, got {n_subbands!r}")
    if not 0 <= m_occupied < n_subbands:
        raise ValueError(
            f"m_occupied must satisfy 0 <= M < N, got M={m_occupied!r}, N={n_subbands!r}"
        )
    leaked = alpha * snr * m_occupied / n_subbands
    return HypothesisVariances(
        var_h0=1.0 + leaked,
        var_h1=1.0 + snr - alpha * snr + leaked,
        model="one-bit-leakage",
    )


def exact_variances(snr: float) -> HypothesisVariances:
    """Full-precision hypothesis variances in units of the noise power."""
    if snr < 0.0:
        raise ValueError(f"snr must be non-negative, got {snr!r}")
    return HypothesisVariances(var_h0=1.0, var_h1=1.0 + snr, model="exact-unquantized")


def variances_for(config: SensingConfig, model: str) -> HypothesisVariances:
    """Absolute (not noise-relative) hypothesis variances for a scenario."""
    if model in ("exact", "normal"):
        rel = exact_variances(config.snr)
    elif model == "onebit":
        rel = onebit_variances(
            config.snr, config.m_occupied, config.n_subbands, config.leakage_alpha
        )
    else:
        raise ValueError(f"unknown analytic model {model!r}, expected one of {ANALYTIC_MODELS}")
    return HypothesisVariances(
        var_h0=rel.var_h0 * config.noise_var,
        var_h1=rel.var_h1 * config.noise_var,
        model=rel.model,
    )


CFAR_BASES = ("quantized", "raw")


def cfar_threshold(config: SensingConfig, target_pfa: float, basis: str = "quantized") -> float:
    """Threshold holding a target false-alarm rate for a scenario.

    One-bit capture raises the vacant-band variance itself, so the
    constant-false-alarm threshold can be set from the leakage-adjusted
    vacant variance ("quantized", the default) or from the raw noise power
    ("raw").  Full-precision scenarios always use the noise power.
    """
    if basis not in CFAR_BASES:
        raise ValueError(f"cfar basis must be one of {CFAR_BASES}, got {basis!r}")
    if config.quantizer == "one-bit" and basis == "quantized":
        vacant_var = variances_for(config, "onebit").var_h0
    else:
        vacant_var = config.noise_var
    return threshold_for_pfa(target_pfa, config.avg_captures, vacant_var)


def roc_analytic(config: SensingConfig, model: str, lambda_grid) -> RocCurve:
    """Evaluate a closed-form operating curve over a threshold grid.

    ``model`` selects the law: "exact" and "onebit" use the Gamma tail with
    the matching hypothesis variances, "normal" the central-limit
    approximation of the full-precision statistic.
    """
    if model not in ANALYTIC_MODELS:
        raise ValueError(f"unknown analytic model {model!r}, expected one of {ANALYTIC_MODELS}")
    grid = np.asarray(lambda_grid, dtype=np.float64)
    if grid.ndim != 1 or grid.size == 0:
        raise ValueError("lambda_grid must be a non-empty 1-D array")
    if np.any(grid < 0.0):
        raise ValueError("lambda_grid values must be non-negative")
    if np.any(np.diff(grid) <= 0.0):
        raise ValueError("lambda_grid must be strictly increasing")

    hv = variances_for(config, model)
    count = config.avg_captures
    if model == "normal":
        pfa = [pfa_normal_approx(lam, count, hv.var_h0) for lam in grid]
        pd = [pd_normal_approx(lam, count, hv.var_h1) for lam in grid]
    else:
        pfa = [pfa_exact(lam, count, hv.var_h0) for lam in grid]
        pd = [pd_exact(lam, count, hv.var_h1) for lam in grid]
    return RocCurve(
        thresholds=grid,
        pfa=np.asarray(pfa),
        pd=np.asarray(pd),
        provenance=_PROVENANCE_FOR_MODEL[model],
        config=config,
    )
