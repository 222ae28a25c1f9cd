"""Hot-kernel backend selection.

Two interchangeable implementations exist: numba-compiled loops
(``obsense.kernels._numba``) and vectorized numpy (``_numpy``).  The
OBSENSE_NUMBA environment variable picks one at import time:

    unset / "auto"        use numba when importable, else fall back to numpy
    "1", "on", "numba"    require numba (ImportError if unavailable)
    "0", "off", "numpy"   force the pure-numpy path

``BACKEND`` names the active choice; ``benchmarks/bench_kernels.py``
compares the two head to head.
"""

from __future__ import annotations

import os

BACKEND_ENV_VAR = "OBSENSE_NUMBA"

_FORCE_OFF = ("0", "off", "false", "no", "numpy")
_FORCE_ON = ("1", "on", "true", "yes", "numba", "jit")


def _resolve_backend() -> str:
    choice = os.environ.get(BACKEND_ENV_VAR, "auto").strip().lower()
    if choice in _FORCE_OFF:
        return "numpy"
    if choice in _FORCE_ON:
        import obsense.kernels._numba  # noqa: F401  raises if numba is missing

        return "numba"
    if choice in ("", "auto"):
        try:
            import obsense.kernels._numba  # noqa: F401
        except ImportError:
            return "numpy"
        return "numba"
    raise ValueError(
        f"{BACKEND_ENV_VAR}={choice!r} not understood; "
        f"use one of {_FORCE_ON + _FORCE_OFF} or 'auto'"
    )


BACKEND = _resolve_backend()

if BACKEND == "numba":
    from obsense.kernels._numba import (
        exceedance_counts,
        fft_unitary,
        ifft_unitary,
        mean_power,
        one_bit_signs,
        window_energy,
    )
else:
    from obsense.kernels._numpy import (
        exceedance_counts,
        fft_unitary,
        ifft_unitary,
        mean_power,
        one_bit_signs,
        window_energy,
    )

__all__ = [
    "BACKEND",
    "BACKEND_ENV_VAR",
    "exceedance_counts",
    "fft_unitary",
    "ifft_unitary",
    "mean_power",
    "one_bit_signs",
    "window_energy",
]
