"""Scenario configuration and shared domain types.

Every quantity the rest of the package consumes has exactly one home here:
the sensing scenario (``SensingConfig``), the random occupancy pattern
(``Occupancy``), one window of captured samples (``WindowCapture``), its
spectral view (``SpectrumWindow``), the per-hypothesis bin variances
(``HypothesisVariances``), and an operating curve (``RocCurve``).

All types are immutable after construction and safe to share between
concurrent workers.  Invariants are enforced in ``__post_init__``, so a
value that violates them cannot be built through the public surface.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Mapping

import numpy as np

ALPHA_DEFAULT = math.exp(-1.0)

QUANTIZERS = ("none", "one-bit")
RSSI_MODES = ("ideal", "estimated")
SIGNAL_MODELS = ("cscg", "qam4-block-fading")
VARIANCE_MODELS = ("exact-unquantized", "one-bit-leakage")
PROVENANCES = ("analytic-exact", "analytic-normal", "analytic-onebit", "simulated")

# Relative tolerance for cross-field consistency checks (snr vs variances,
# ideal power reading, statistic recomputation).
_REL_TOL = 1e-12


def db_to_linear(value_db: float) -> float:
    """Convert a power ratio from dB to linear scale."""
    return 10.0 ** (value_db / 10.0)


def linear_to_db(value: float) -> float:
    """Convert a positive linear power ratio to dB."""
    if value <= 0.0:
        raise ValueError(f"cannot express non-positive ratio {value!r} in dB")
    return 10.0 * math.log10(value)


def _rel_close(a: float, b: float, rel: float = _REL_TOL) -> bool:
    scale = max(abs(a), abs(b), 1.0)
    return abs(a - b) <= rel * scale


@dataclass(frozen=True)
class SensingConfig:
    """All parameters of one sensing scenario.

    Attributes:
        n_subbands: number of equal-width sub-bands N monitored at once.
        subband_bandwidth: width B of one sub-band in Hz (metadata only).
        sample_rate: receiver sampling rate, exactly ``n_subbands * subband_bandwidth``.
        m_occupied: number M of sub-bands occupied by primary transmitters.
        avg_captures: captures L averaged into one decision statistic.
        noise_var: per-sub-band noise power (linear).
        signal_var: per-sub-band received primary power (linear).
        snr: per-sub-band signal-to-noise ratio, ``signal_var / noise_var``.
        quantizer: "none" for full precision, "one-bit" for sign capture.
        rssi_mode: "ideal" uses the model total power, "estimated" measures it.
        signal_model: primary-signal synthesis mode.
        leakage_alpha: fraction of occupied-band power the one-bit front end
            smears uniformly across the whole band; defaults to 1/e.
    """

    n_subbands: int
    m_occupied: int
    avg_captures: int
    noise_var: float = 1.0
    signal_var: float = 1.0
    snr: float = 1.0
    subband_bandwidth: float = 1e6
    sample_rate: float = field(default=0.0)
    quantizer: str = "none"
    rssi_mode: str = "ideal"
    signal_model: str = "cscg"
    leakage_alpha: float = ALPHA_DEFAULT

    def __post_init__(self) -> None:
        if self.sample_rate == 0.0:
            object.__setattr__(
                self, "sample_rate", float(self.n_subbands) * float(self.subband_bandwidth)
            )
        _check_config(self)

    @classmethod
    def make(
        cls,
        n_subbands: int,
        m_occupied: int,
        avg_captures: int,
        noise_var: float = 1.0,
        signal_var: float | None = None,
        snr: float | None = None,
        snr_db: float | None = None,
        subband_bandwidth: float = 1e6,
        quantizer: str = "none",
        rssi_mode: str = "ideal",
        signal_model: str = "cscg",
        leakage_alpha: float = ALPHA_DEFAULT,
    ) -> "SensingConfig":
        """Build a config, resolving the signal level from ``signal_var``,
        ``snr`` (linear) or ``snr_db``.

        ``snr_db`` excludes the other two; a consistent signal_var/snr pair
        is accepted as-is.  Omitting all selects snr = 1 (0 dB).
        ``sample_rate`` is always derived as N * B.
        """
        if snr_db is not None:
            if snr is not None or signal_var is not None:
                raise ValueError("snr_db excludes snr and signal_var")
            snr = db_to_linear(snr_db)
        if snr is None and signal_var is None:
            snr = 1.0
        if noise_var <= 0.0:
            raise ValueError(f"noise_var must be positive, got {noise_var!r}")
        if signal_var is None:
            signal_var = snr * noise_var
        if snr is None:
            snr = signal_var / noise_var
        return cls(
            n_subbands=n_subbands,
            m_occupied=m_occupied,
            avg_captures=avg_captures,
            noise_var=float(noise_var),
            signal_var=float(signal_var),
            snr=float(snr),
            subband_bandwidth=float(subband_bandwidth),
            quantizer=quantizer,
            rssi_mode=rssi_mode,
            signal_model=signal_model,
            leakage_alpha=float(leakage_alpha),
        )

    @property
    def snr_db(self) -> float:
        return linear_to_db(self.snr)

    @property
    def samples_per_window(self) -> int:
        return self.n_subbands * self.avg_captures

    @property
    def total_power(self) -> float:
        """Model value of the wideband power reading: M*sigma_S^2 + N*sigma_W^2."""
        return self.m_occupied * self.signal_var + self.n_subbands * self.noise_var

    def with_updates(self, **changes) -> "SensingConfig":
        """Return a copy with the given fields replaced, re-deriving snr or
        signal_var when only one side of the pair changed."""
        if "snr" in changes and "signal_var" not in changes:
            changes["signal_var"] = changes["snr"] * changes.get("noise_var", self.noise_var)
        elif "signal_var" in changes and "snr" not in changes:
            nv = changes.get("noise_var", self.noise_var)
            changes["snr"] = changes["signal_var"] / nv
        elif "noise_var" in changes and "snr" not in changes and "signal_var" not in changes:
            changes["snr"] = self.signal_var / changes["noise_var"]
        if "n_subbands" in changes or "subband_bandwidth" in changes:
            n = changes.get("n_subbands", self.n_subbands)
            b = changes.get("subband_bandwidth", self.subband_bandwidth)
            changes.setdefault("sample_rate", float(n) * float(b))
        return replace(self, **changes)


def _check_config(cfg: SensingConfig) -> None:
    if not isinstance(cfg.n_subbands, (int, np.integer)) or cfg.n_subbands < 1:
        raise ValueError(f"n_subbands must be a positive integer, got {cfg.n_subbands!r}")
    if not isinstance(cfg.m_occupied, (int, np.integer)) or cfg.m_occupied < 0:
        raise ValueError(f"m_occupied must be a non-negative integer, got {cfg.m_occupied!r}")
    if cfg.m_occupied >= cfg.n_subbands:
        raise ValueError(
            f"m_occupied must be smaller than n_subbands "
            f"(got M={cfg.m_occupied}, N={cfg.n_subbands})"
        )
    if not isinstance(cfg.avg_captures, (int, np.integer)) or cfg.avg_captures < 1:
        raise ValueError(f"avg_captures must be a positive integer, got {cfg.avg_captures!r}")
    if cfg.noise_var <= 0.0:
        raise ValueError(f"noise_var must be positive, got {cfg.noise_var!r}")
    if cfg.signal_var < 0.0:
        raise ValueError(f"signal_var must be non-negative, got {cfg.signal_var!r}")
    if cfg.subband_bandwidth <= 0.0:
        raise ValueError(f"subband_bandwidth must be positive, got {cfg.subband_bandwidth!r}")
    if cfg.sample_rate != cfg.n_subbands * cfg.subband_bandwidth:
        raise ValueError(
            f"sample_rate must equal n_subbands * subband_bandwidth exactly "
            f"({cfg.sample_rate!r} != {cfg.n_subbands * cfg.subband_bandwidth!r})"
        )
    if not _rel_close(cfg.snr * cfg.noise_var, cfg.signal_var):
        raise ValueError(
            f"snr is inconsistent with signal_var/noise_var "
            f"({cfg.snr!r} vs {cfg.signal_var / cfg.noise_var!r})"
        )
    # A leaked fraction above 1 would place less power in an occupied band
    # than in a vacant one, which the variance model forbids.
    if not 0.0 < cfg.leakage_alpha <= 1.0:
        raise ValueError(f"leakage_alpha must lie in (0, 1], got {cfg.leakage_alpha!r}")
    if cfg.quantizer not in QUANTIZERS:
        raise ValueError(f"quantizer must be one of {QUANTIZERS}, got {cfg.quantizer!r}")
    if cfg.rssi_mode not in RSSI_MODES:
        raise ValueError(f"rssi_mode must be one of {RSSI_MODES}, got {cfg.rssi_mode!r}")
    if cfg.signal_model not in SIGNAL_MODELS:
        raise ValueError(f"signal_model must be one of {SIGNAL_MODELS}, got {cfg.signal_model!r}")


def validate(config: SensingConfig) -> SensingConfig:
    """Re-run every invariant check and hand the config back.

    Constructors already validate, so this mainly guards values that crossed
    a serialization boundary (config files, worker processes).
    """
    _check_config(config)
    return config


@dataclass(frozen=True)
class Occupancy:
    """The set of sub-band indices currently used by primary transmitters."""

    occupied_set: frozenset
    n_subbands: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "occupied_set", frozenset(int(i) for i in self.occupied_set))
        if len(self.occupied_set) >= self.n_subbands:
            raise ValueError(
                f"occupancy has {len(self.occupied_set)} bands but only "
                f"{self.n_subbands} sub-bands exist (at least one must stay vacant)"
            )
        for idx in self.occupied_set:
            if not 0 <= idx < self.n_subbands:
                raise ValueError(f"occupied index {idx} outside [0, {self.n_subbands})")

    @property
    def count(self) -> int:
        return len(self.occupied_set)

    def indices(self) -> np.ndarray:
        """Occupied indices in ascending order (stable for reproducible draws)."""
        return np.asarray(sorted(self.occupied_set), dtype=np.int64)

    def mask(self) -> np.ndarray:
        """Boolean occupancy mask of length n_subbands."""
        m = np.zeros(self.n_subbands, dtype=bool)
        if self.occupied_set:
            m[self.indices()] = True
        return m


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr = np.asarray(arr)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class WindowCapture:
    """One window of time-domain samples plus its ground truth.

    ``samples`` holds L*N complex values (L captures back to back);
    ``power_reading`` is the wideband power the receiver's strength
    indicator reported for this window.
    """

    samples: np.ndarray
    occupancy: Occupancy
    power_reading: float
    window_index: int = 0

    def __post_init__(self) -> None:
        samples = np.asarray(self.samples, dtype=np.complex128)
        if samples.ndim != 1 or samples.size == 0:
            raise ValueError("samples must be a non-empty 1-D complex array")
        object.__setattr__(self, "samples", _freeze(samples))
        if not self.power_reading > 0.0:
            raise ValueError(f"power_reading must be positive, got {self.power_reading!r}")
        if self.window_index < 0:
            raise ValueError(f"window_index must be non-negative, got {self.window_index!r}")

    def validate_against(self, config: SensingConfig) -> "WindowCapture":
        """Check the window against the scenario that produced it."""
        if self.samples.size != config.samples_per_window:
            raise ValueError(
                f"window holds {self.samples.size} samples, expected "
                f"L*N = {config.samples_per_window}"
            )
        if self.occupancy.count != config.m_occupied:
            raise ValueError(
                f"occupancy has {self.occupancy.count} bands, expected {config.m_occupied}"
            )
        if config.rssi_mode == "ideal" and not _rel_close(self.power_reading, config.total_power):
            raise ValueError(
                f"ideal power reading {self.power_reading!r} does not match "
                f"M*signal_var + N*noise_var = {config.total_power!r}"
            )
        return self

    def captures(self, n_subbands: int) -> np.ndarray:
        """View the window as an (L, N) array of captures."""
        if self.samples.size % n_subbands:
            raise ValueError(
                f"{self.samples.size} samples do not divide into captures of {n_subbands}"
            )
        return self.samples.reshape(-1, n_subbands)


@dataclass(frozen=True)
class SpectrumWindow:
    """L per-capture frequency vectors and the per-sub-band energy averages."""

    bins: np.ndarray
    statistics: np.ndarray

    def __post_init__(self) -> None:
        bins = np.asarray(self.bins, dtype=np.complex128)
        stats = np.asarray(self.statistics, dtype=np.float64)
        if bins.ndim != 2:
            raise ValueError("bins must be a 2-D (captures x subbands) array")
        if stats.shape != (bins.shape[1],):
            raise ValueError(
                f"statistics shape {stats.shape} does not match {bins.shape[1]} sub-bands"
            )
        if np.any(stats < 0.0):
            raise ValueError("statistics must be non-negative")
        expected = np.mean(bins.real**2 + bins.imag**2, axis=0)
        scale = np.maximum(np.maximum(np.abs(expected), np.abs(stats)), 1.0)
        if np.any(np.abs(stats - expected) > _REL_TOL * scale):
            raise ValueError("statistics are not the per-bin mean energy of bins")
        object.__setattr__(self, "bins", _freeze(bins))
        object.__setattr__(self, "statistics", _freeze(stats))

    @classmethod
    def from_bins(cls, bins: np.ndarray) -> "SpectrumWindow":
        bins = np.asarray(bins, dtype=np.complex128)
        stats = np.mean(bins.real**2 + bins.imag**2, axis=0)
        return cls(bins=bins, statistics=stats)


@dataclass(frozen=True)
class HypothesisVariances:
    """Per-bin spectral variance under the vacant and occupied hypotheses."""

    var_h0: float
    var_h1: float
    model: str

    def __post_init__(self) -> None:
        if self.var_h0 <= 0.0:
            raise ValueError(f"var_h0 must be positive, got {self.var_h0!r}")
        if self.var_h1 <= 0.0:
            raise ValueError(f"var_h1 must be positive, got {self.var_h1!r}")
        if self.var_h1 < self.var_h0 * (1.0 - _REL_TOL):
            raise ValueError(
                f"occupied-band variance {self.var_h1!r} below vacant-band "
                f"variance {self.var_h0!r}"
            )
        if self.model not in VARIANCE_MODELS:
            raise ValueError(f"model must be one of {VARIANCE_MODELS}, got {self.model!r}")


@dataclass(frozen=True)
class RocCurve:
    """Ordered (threshold, pfa, pd) triples from one analysis or simulation.

    A single threshold is shared by all sub-bands: they are statistically
    identical under the model, so a per-band threshold buys nothing.
    """

    thresholds: np.ndarray
    pfa: np.ndarray
    pd: np.ndarray
    provenance: str
    config: SensingConfig

    def __post_init__(self) -> None:
        thr = np.asarray(self.thresholds, dtype=np.float64)
        pfa = np.asarray(self.pfa, dtype=np.float64)
        pd = np.asarray(self.pd, dtype=np.float64)
        if thr.ndim != 1 or thr.size == 0:
            raise ValueError("thresholds must be a non-empty 1-D array")
        if pfa.shape != thr.shape or pd.shape != thr.shape:
            raise ValueError("thresholds, pfa and pd must have identical shapes")
        if self.provenance not in PROVENANCES:
            raise ValueError(f"provenance must be one of {PROVENANCES}, got {self.provenance!r}")
        if np.any(thr < 0.0):
            raise ValueError("thresholds must be non-negative")
        if np.any(np.diff(thr) <= 0.0):
            raise ValueError("thresholds must be strictly increasing")
        for name, arr in (("pfa", pfa), ("pd", pd)):
            if np.any(arr < -_REL_TOL) or np.any(arr > 1.0 + _REL_TOL):
                raise ValueError(f"{name} values must lie in [0, 1]")
            if np.any(np.diff(arr) > _REL_TOL):
                raise ValueError(f"{name} must be non-increasing along the threshold sweep")
        if self.provenance.startswith("analytic") and self.config.signal_var > 0.0:
            if np.any(pd < pfa - _REL_TOL):
                raise ValueError("analytic curve has pd < pfa despite a present signal")
        object.__setattr__(self, "thresholds", _freeze(thr))
        object.__setattr__(self, "pfa", _freeze(pfa))
        object.__setattr__(self, "pd", _freeze(pd))

    @property
    def points(self) -> list:
        """The curve as a list of (threshold, pfa, pd) tuples."""
        return list(zip(self.thresholds.tolist(), self.pfa.tolist(), self.pd.tolist()))


# --- flat key=value config files -------------------------------------------

_CONFIG_FIELD_PARSERS = {
    "n_subbands": int,
    "subband_bandwidth": float,
    "sample_rate": float,
    "m_occupied": int,
    "avg_captures": int,
    "noise_var": float,
    "signal_var": float,
    "snr": float,
    "quantizer": str,
    "rssi_mode": str,
    "signal_model": str,
    "leakage_alpha": float,
}


def parse_config_file(path) -> dict:
    """Read a flat key=value scenario file.

    Keys must match ``SensingConfig`` field names exactly; blank lines and
    ``#`` comments are ignored.  Values are returned already coerced.
    """
    values: dict = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key=value, got {raw.strip()!r}")
            key, _, value = line.partition("=")
            key = key.strip()
            value = value.strip()
            if key not in _CONFIG_FIELD_PARSERS:
                raise ValueError(f"{path}:{lineno}: unknown config key {key!r}")
            try:
                values[key] = _CONFIG_FIELD_PARSERS[key](value)
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: bad value for {key!r}: {exc}") from None
    return values


def config_from_mapping(values: Mapping) -> SensingConfig:
    """Build a validated config from parsed file values (see parse_config_file)."""
    values = dict(values)
    sample_rate = values.pop("sample_rate", None)
    cfg = SensingConfig.make(
        n_subbands=values.pop("n_subbands"),
        m_occupied=values.pop("m_occupied"),
        avg_captures=values.pop("avg_captures"),
        noise_var=values.pop("noise_var", 1.0),
        signal_var=values.pop("signal_var", None),
        snr=values.pop("snr", None),
        subband_bandwidth=values.pop("subband_bandwidth", 1e6),
        quantizer=values.pop("quantizer", "none"),
        rssi_mode=values.pop("rssi_mode", "ideal"),
        signal_model=values.pop("signal_model", "cscg"),
        leakage_alpha=values.pop("leakage_alpha", ALPHA_DEFAULT),
    )
    if values:
        raise ValueError(f"unknown config keys: {sorted(values)}")
    if sample_rate is not None and sample_rate != cfg.sample_rate:
        raise ValueError(
            f"sample_rate {sample_rate!r} contradicts n_subbands * subband_bandwidth "
            f"= {cfg.sample_rate!r}"
        )
    return cfg
