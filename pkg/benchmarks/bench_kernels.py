#!/usr/bin/env python3
"""Head-to-head timing of the numba and pure-numpy kernel backends.

Runs each hot kernel on representative sizes plus the full per-trial chain
(inverse transform -> sign capture -> scaled transform -> energy average ->
threshold counting) and prints per-call timings for both backends.

Usage:
    python benchmarks/bench_kernels.py [--n 1024] [--avg 8] [--points 50]
                                       [--repeat 200]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from obsense.kernels import _numpy as np_kernels

try:
    from obsense.kernels import _numba as nb_kernels
except ImportError:
    nb_kernels = None


def _time(fn, repeat: int) -> float:
    fn()  # warm-up (JIT compile / cache touch)
    start = time.perf_counter()
    for _ in range(repeat):
        fn()
    return (time.perf_counter() - start) / repeat


def _trial_chain(kernels, bins, power, mask, thresholds):
    samples = kernels.ifft_unitary(bins)  # generation side
    stats = kernels.window_energy(samples, power, True)
    return kernels.exceedance_counts(stats, mask, thresholds)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--n", type=int, default=1024, help="sub-bands per capture")
    parser.add_argument("--avg", type=int, default=8, help="captures per window")
    parser.add_argument("--m", type=int, default=100, help="occupied sub-bands")
    parser.add_argument("--points", type=int, default=50, help="threshold grid size")
    parser.add_argument("--repeat", type=int, default=200, help="timed calls per kernel")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    rng = np.random.default_rng(args.seed)
    bins = rng.standard_normal((args.avg, args.n)) + 1j * rng.standard_normal((args.avg, args.n))
    power = args.m + args.n
    mask = np.zeros(args.n, dtype=bool)
    mask[rng.choice(args.n, size=args.m, replace=False)] = True
    thresholds = np.linspace(0.0, 3.0, args.points)
    stats = np_kernels.mean_power(bins)

    cases = [
        ("fft_unitary", lambda k: k.fft_unitary(bins)),
        ("ifft_unitary", lambda k: k.ifft_unitary(bins)),
        ("one_bit_signs", lambda k: k.one_bit_signs(bins)),
        ("mean_power", lambda k: k.mean_power(bins)),
        ("window_energy", lambda k: k.window_energy(bins, power, True)),  # bins stand in for time captures
        ("exceedance_counts", lambda k: k.exceedance_counts(stats, mask, thresholds)),
        ("trial_chain", lambda k: _trial_chain(k, bins, power, mask, thresholds)),
    ]

    backends = [("numpy", np_kernels)]
    if nb_kernels is not None:
        backends.append(("numba", nb_kernels))
    else:
        print("numba unavailable; timing the numpy backend only")

    print(f"N={args.n} L={args.avg} M={args.m} grid={args.points} repeat={args.repeat}")
    header = f"{'kernel':<20}" + "".join(f"{name + ' (us)':>14}" for name, _ in backends)
    if len(backends) == 2:
        header += f"{'speedup':>10}"
    print(header)
    for case_name, call in cases:
        times = [_time(lambda k=kern: call(k), args.repeat) for _, kern in backends]
        row = f"{case_name:<20}" + "".join(f"{t * 1e6:>14.1f}" for t in times)
        if len(times) == 2 and times[1] > 0:
            row += f"{times[0] / times[1]:>9.2f}x"
        print(row)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
