"""Wideband spectrum-sensing toolkit: one-bit quantized energy detection.

The package models a secondary receiver that watches N equal sub-bands of a
wide channel, averages L spectral captures into one energy statistic per
sub-band, and thresholds that statistic to decide occupancy.  Closed-form
false-alarm/detection probabilities (exact chi-square and a Gaussian
approximation), a leakage model for the one-bit quantized front end, and a
Monte Carlo harness for validating both live in the submodules:

- ``model``      scenario configuration and shared domain types
- ``analytic``   closed-form ROC analytics and threshold inversion
- ``pipeline``   signal generation and the quantize/transform/average chain
- ``montecarlo`` repeated-trial empirical rate estimation
- ``cli``        command-line front end with figure presets

Hot numeric kernels live in ``obsense.kernels`` with a numba-accelerated and
a pure-numpy backend, selected by the OBSENSE_NUMBA environment variable.
"""

from obsense.model import (
    ALPHA_DEFAULT,
    HypothesisVariances,
    Occupancy,
    RocCurve,
    SensingConfig,
    SpectrumWindow,
    WindowCapture,
    validate,
)

__version__ = "0.1.0"

__all__ = [
    "ALPHA_DEFAULT",
    "HypothesisVariances",
    "Occupancy",
    "RocCurve",
    "SensingConfig",
    "SpectrumWindow",
    "WindowCapture",
    "validate",
    "__version__",
]
