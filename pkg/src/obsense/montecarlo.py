"""Repeated-trial estimation of empirical false-alarm and detection rates.

Each trial draws a fresh occupancy, synthesizes one window, runs it through
the configured receive chain and thresholds every sub-band against the whole
threshold grid.  False alarms are counted over vacant bins, detections over
occupied bins, so one window contributes N-M and M Bernoulli outcomes
respectively.  A trial's outcome depends only on (master_seed, trial index)
and counts are reduced by integer addition, which makes results bit-identical
for any worker count.
"""

from __future__ import annotations

import multiprocessing
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from obsense.analytic import threshold_for_pfa
from obsense.kernels import exceedance_counts
from obsense.model import RocCurve, SensingConfig, validate
from obsense.pipeline import draw_occupancy, generate_window, trial_rng, window_statistics

DEFAULT_GRID_POINTS = 50
DENSE_GRID_POINTS = 128
DEFAULT_TRIALS = 10_000
FULL_TRIALS = 100_000


@dataclass(frozen=True)
class TrialPlan:
    """One experiment: how many windows to draw and where to threshold them."""

    trials: int
    master_seed: int
    lambda_grid: np.ndarray
    config: SensingConfig

    def __post_init__(self) -> None:
        if self.trials < 1:
            raise ValueError(f"trials must be at least 1, got {self.trials!r}")
        grid = np.asarray(self.lambda_grid, dtype=np.float64)
        if grid.ndim != 1 or grid.size == 0:
            raise ValueError("lambda_grid must be a non-empty 1-D array")
        if np.any(grid < 0.0):
            raise ValueError("lambda_grid values must be non-negative")
        if np.any(np.diff(grid) <= 0.0):
            raise ValueError("lambda_grid must be strictly increasing")
        grid.setflags(write=False)
        object.__setattr__(self, "lambda_grid", grid)
        validate(self.config)


@dataclass(frozen=True)
class EmpiricalRates:
    """Per-threshold exceedance counts with their binomial uncertainty.

    Bins of one window share a quantized front end, so their outcomes are
    exchangeable rather than independent; the standard errors below treat
    them as independent Bernoulli draws and are therefore mildly optimistic
    for the one-bit pipeline.
    """

    thresholds: np.ndarray
    fa_count: np.ndarray
    det_count: np.ndarray
    fa_total: int
    det_total: int

    def __post_init__(self) -> None:
        thresholds = np.asarray(self.thresholds, dtype=np.float64)
        fa = np.asarray(self.fa_count, dtype=np.int64)
        det = np.asarray(self.det_count, dtype=np.int64)
        if fa.shape != thresholds.shape or det.shape != thresholds.shape:
            raise ValueError("count arrays must match the threshold grid")
        if np.any(fa < 0) or np.any(fa > self.fa_total):
            raise ValueError("false-alarm counts must lie in [0, fa_total]")
        if np.any(det < 0) or np.any(det > self.det_total):
            raise ValueError("detection counts must lie in [0, det_total]")
        if np.any(np.diff(fa) > 0) or np.any(np.diff(det) > 0):
            raise ValueError("counts must be non-increasing along the threshold grid")
        for name, arr in (("thresholds", thresholds), ("fa_count", fa), ("det_count", det)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def pfa_hat(self) -> np.ndarray:
        return self.fa_count / self.fa_total

    @property
    def pd_hat(self) -> np.ndarray:
        if self.det_total == 0:
            return np.full(self.det_count.shape, np.nan)
        return self.det_count / self.det_total

    @property
    def pfa_se(self) -> np.ndarray:
        p = self.pfa_hat
        return np.sqrt(p * (1.0 - p) / self.fa_total)

    @property
    def pd_se(self) -> np.ndarray:
        if self.det_total == 0:
            return np.full(self.det_count.shape, np.nan)
        p = self.pd_hat
        return np.sqrt(p * (1.0 - p) / self.det_total)


def _chunk_counts(plan: TrialPlan, start: int, stop: int):
    """Accumulate exceedance counts for trials [start, stop)."""
    config = plan.config
    grid = plan.lambda_grid
    fa = np.zeros(grid.size, dtype=np.int64)
    det = np.zeros(grid.size, dtype=np.int64)
    for trial in range(start, stop):
        rng = trial_rng(plan.master_seed, trial)
        occupancy = draw_occupancy(config, rng)
        capture = generate_window(config, occupancy, rng, window_index=trial)
        stats = window_statistics(capture, config)
        fa_t, det_t = exceedance_counts(stats, occupancy.mask(), grid)
        fa += fa_t
        det += det_t
    return fa, det


def run(plan: TrialPlan, workers: int = 1):
    """Execute a trial plan; returns (EmpiricalRates, simulated RocCurve).

    ``workers`` only splits the trial range across processes; the counts it
    returns are identical for every worker count.
    """
    if workers < 1:
        raise ValueError(f"workers must be at least 1, got {workers!r}")
    workers = min(workers, plan.trials)
    if workers == 1:
        fa, det = _chunk_counts(plan, 0, plan.trials)
    else:
        bounds = np.linspace(0, plan.trials, workers + 1, dtype=int)
        ctx = None
        if "fork" in multiprocessing.get_all_start_methods():
            ctx = multiprocessing.get_context("fork")
        with ProcessPoolExecutor(max_workers=workers, mp_context=ctx) as pool:
            parts = pool.map(_chunk_counts, [plan] * workers, bounds[:-1], bounds[1:])
            fa = np.zeros(plan.lambda_grid.size, dtype=np.int64)
            det = np.zeros(plan.lambda_grid.size, dtype=np.int64)
            for fa_part, det_part in parts:
                fa += fa_part
                det += det_part
    config = plan.config
    rates = EmpiricalRates(
        thresholds=plan.lambda_grid,
        fa_count=fa,
        det_count=det,
        fa_total=plan.trials * (config.n_subbands - config.m_occupied),
        det_total=plan.trials * config.m_occupied,
    )
    curve = RocCurve(
        thresholds=plan.lambda_grid,
        pfa=rates.pfa_hat,
        pd=rates.pd_hat,
        provenance="simulated",
        config=config,
    )
    return rates, curve


def pfa_spaced_grid(
    avg_captures: int,
    vacant_var: float,
    points: int = DEFAULT_GRID_POINTS,
    lo: float = 1e-3,
    hi: float = 1.0,
) -> np.ndarray:
    """Threshold grid whose exact false-alarm rates are log-spaced in [lo, hi].

    Spacing thresholds by false-alarm rate instead of linearly in lambda
    spreads ROC points evenly over the interesting low-pfa decades.
    """
    if not 0.0 < lo < hi <= 1.0:
        raise ValueError(f"need 0 < lo < hi <= 1, got lo={lo!r}, hi={hi!r}")
    if points < 2:
        raise ValueError(f"grid needs at least 2 points, got {points!r}")
    rates = np.logspace(np.log10(lo), np.log10(hi), points)[::-1]
    grid = np.array([threshold_for_pfa(p, avg_captures, vacant_var) for p in rates])
    if np.any(np.diff(grid) <= 0.0):
        raise ValueError("false-alarm grid did not invert to distinct thresholds")
    return grid


@dataclass(frozen=True)
class ComparisonReport:
    """Pointwise detection-probability gaps between curves on a shared pfa grid.

    The first curve is the reference; gap statistics are taken against it.
    """

    pfa_grid: np.ndarray
    pd_values: np.ndarray
    max_gap: float
    mean_gap: float
    per_curve_max: np.ndarray
    per_curve_mean: np.ndarray


def _as_pfa_pd(curve):
    if hasattr(curve, "pfa") and hasattr(curve, "pd"):
        return np.asarray(curve.pfa, dtype=np.float64), np.asarray(curve.pd, dtype=np.float64)
    pfa, pd = curve
    return np.asarray(pfa, dtype=np.float64), np.asarray(pd, dtype=np.float64)


def _pd_at(pfa_grid: np.ndarray, pfa: np.ndarray, pd: np.ndarray) -> np.ndarray:
    """Interpolate pd at the grid, tolerating duplicated pfa values.

    Duplicates appear where the sweep saturates (counts stuck at 0 or the
    total); they collapse to their largest pd, the curve's upper envelope.
    """
    order = np.argsort(pfa, kind="stable")
    x = pfa[order]
    y = pd[order]
    if np.any(x[1:] == x[:-1]):
        ux, inverse = np.unique(x, return_inverse=True)
        uy = np.full(ux.size, -np.inf)
        np.maximum.at(uy, inverse, y)
        x, y = ux, uy
    return np.interp(pfa_grid, x, y)


def roc_compare(*curves, pfa_grid=None, points: int = 101) -> ComparisonReport:
    """Align two or more operating curves on a common false-alarm grid.

    Curves may be RocCurve objects or plain (pfa, pd) array pairs; both
    arrays must come from one monotone threshold sweep.  Detection
    probabilities are interpolated at shared false-alarm rates and the
    report carries max and mean |delta pd| of every curve against the first.
    """
    if len(curves) < 2:
        raise ValueError("need at least two curves to compare")
    pairs = [_as_pfa_pd(c) for c in curves]
    if pfa_grid is None:
        lo = max(float(np.min(p)) for p, _ in pairs)
        hi = min(float(np.max(p)) for p, _ in pairs)
        if not lo < hi:
            raise ValueError("curves share no false-alarm range to compare on")
        pfa_grid = np.linspace(lo, hi, points)
    else:
        pfa_grid = np.asarray(pfa_grid, dtype=np.float64)
    pd_values = np.vstack([_pd_at(pfa_grid, p, d) for p, d in pairs])
    gaps = np.abs(pd_values[1:] - pd_values[0])
    return ComparisonReport(
        pfa_grid=pfa_grid,
        pd_values=pd_values,
        max_gap=float(np.max(gaps)),
        mean_gap=float(np.mean(gaps)),
        per_curve_max=np.max(gaps, axis=1),
        per_curve_mean=np.mean(gaps, axis=1),
    )
