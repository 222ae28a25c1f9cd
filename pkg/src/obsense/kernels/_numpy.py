"""Pure-numpy reference implementations of the hot kernels.

Every function here has a numba twin in ``_numba``; the two must agree to
floating-point rounding on identical inputs.  Transform lengths are
restricted to powers of two so both backends share one contract.
"""

from __future__ import annotations

import numpy as np


def _check_pow2(n: int) -> None:
    if n < 1 or (n & (n - 1)) != 0:
        raise ValueError(f"transform length must be a power of two, got {n}")


def fft_unitary(x: np.ndarray) -> np.ndarray:
    """Forward DFT along the last axis with 1/sqrt(n) normalization."""
    x = np.asarray(x, dtype=np.complex128)
    _check_pow2(x.shape[-1])
    return np.fft.fft(x, axis=-1, norm="ortho")


def ifft_unitary(x: np.ndarray) -> np.ndarray:
    """Inverse DFT along the last axis with 1/sqrt(n) normalization."""
    x = np.asarray(x, dtype=np.complex128)
    _check_pow2(x.shape[-1])
    return np.fft.ifft(x, axis=-1, norm="ortho")


def one_bit_signs(x: np.ndarray) -> np.ndarray:
    """Map each complex sample to sign(re) + 1j*sign(im), with sign(0) = +1."""
    x = np.asarray(x)
    re = np.where(x.real >= 0.0, 1.0, -1.0)
    im = np.where(x.imag >= 0.0, 1.0, -1.0)
    return re + 1j * im


def mean_power(bins: np.ndarray) -> np.ndarray:
    """Per-column mean of |.|^2 over the rows of a (captures, subbands) array."""
    bins = np.asarray(bins)
    if bins.ndim != 2:
        raise ValueError("bins must be a 2-D (captures x subbands) array")
    return np.mean(bins.real**2 + bins.imag**2, axis=0)


def window_energy(captures: np.ndarray, power_reading: float, one_bit: bool) -> np.ndarray:
    """Receive chain for one window of time-domain captures.

    Mirrors the composed ops exactly: optional sign capture with
    sqrt(power/(2N)) rescaling, forward unitary transform, per-sub-band
    energy average.
    """
    captures = np.asarray(captures, dtype=np.complex128)
    if captures.ndim != 2:
        raise ValueError("captures must be a 2-D (captures x subbands) array")
    if one_bit:
        scale = np.sqrt(power_reading / (2.0 * captures.shape[-1]))
        spectrum = scale * fft_unitary(one_bit_signs(captures))
    else:
        spectrum = fft_unitary(captures)
    return mean_power(spectrum)


def exceedance_counts(stats, occupied_mask, thresholds):
    """Count statistic exceedances per threshold, split by occupancy.

    Returns (false_alarms, detections) as int64 arrays aligned with the
    ascending ``thresholds``; an exceedance is strictly greater-than, so a
    statistic equal to the threshold stays a vacancy decision.
    """
    stats = np.asarray(stats, dtype=np.float64)
    occupied_mask = np.asarray(occupied_mask, dtype=bool)
    thresholds = np.asarray(thresholds, dtype=np.float64)
    vacant = np.sort(stats[~occupied_mask])
    occupied = np.sort(stats[occupied_mask])
    fa = vacant.size - np.searchsorted(vacant, thresholds, side="right")
    det = occupied.size - np.searchsorted(occupied, thresholds, side="right")
    return fa.astype(np.int64), det.astype(np.int64)
