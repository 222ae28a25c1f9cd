"""Signal generation and the receive pipeline.

A window is synthesized directly in the frequency domain: every bin gets
independent complex Gaussian noise, occupied bins additionally carry the
primary signal, and the inverse unitary transform produces the time-domain
samples the receiver would have captured.  The receive chain then runs the
samples back through the forward transform, either at full precision or
after one-bit sign capture with total-power rescaling from the wideband
power reading.

All operations are pure given (config, rng); distinct windows can be
processed fully in parallel as long as each worker keeps its own substream.
"""

from __future__ import annotations

import struct

import numpy as np

from obsense.kernels import fft_unitary, ifft_unitary, mean_power, one_bit_signs, window_energy
from obsense.model import Occupancy, SensingConfig, SpectrumWindow, WindowCapture

_SEED_MASK = 0xFFFFFFFFFFFFFFFF

DUMP_MAGIC = b"OBWS"
DUMP_VERSION = 1
_DUMP_HEADER = struct.Struct("<4sIIIIQ4x")  # magic, version, N, L, M, seed, pad


def trial_rng(master_seed: int, trial_index: int = 0) -> np.random.Generator:
    """Deterministic substream for one trial.

    The (seed, index) pair is hashed through numpy's seed sequence, so every
    trial gets an independent stream and identical inputs always reproduce
    the identical sample sequence, regardless of which worker runs it.
    """
    if trial_index < 0:
        raise ValueError(f"trial_index must be non-negative, got {trial_index!r}")
    seq = np.random.SeedSequence([int(master_seed) & _SEED_MASK, int(trial_index)])
    return np.random.default_rng(seq)


def _cscg(rng: np.random.Generator, shape, var: float) -> np.ndarray:
    """Circularly-symmetric complex Gaussian draws with E|x|^2 = var."""
    scale = np.sqrt(var / 2.0)
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def _qam4(rng: np.random.Generator, shape) -> np.ndarray:
    """Unit-power 4-QAM symbols (+-1 +- 1j)/sqrt(2)."""
    re = 2.0 * rng.integers(0, 2, size=shape) - 1.0
    im = 2.0 * rng.integers(0, 2, size=shape) - 1.0
    return (re + 1j * im) / np.sqrt(2.0)


def draw_occupancy(config: SensingConfig, rng: np.random.Generator) -> Occupancy:
    """Uniform random M-subset of the N sub-bands, without replacement."""
    indices = rng.choice(config.n_subbands, size=config.m_occupied, replace=False)
    return Occupancy(occupied_set=frozenset(int(i) for i in indices), n_subbands=config.n_subbands)


def generate_window(
    config: SensingConfig,
    occupancy: Occupancy,
    rng: np.random.Generator,
    window_index: int = 0,
) -> WindowCapture:
    """Synthesize one window of L*N time-domain samples.

    Occupancy stays fixed for the whole window.  In the default cscg mode
    occupied bins receive independent complex Gaussian signal per capture;
    qam4-block-fading instead draws 4-QAM symbols per capture under one
    complex Gaussian fading gain held constant across the window, scaled so
    the expected received per-bin power is still signal_var.
    """
    captures = config.avg_captures
    n = config.n_subbands
    bins = _cscg(rng, (captures, n), config.noise_var)
    occupied = occupancy.indices()
    if occupied.size and config.signal_var > 0.0:
        if config.signal_model == "cscg":
            bins[:, occupied] += _cscg(rng, (captures, occupied.size), config.signal_var)
        else:
            gains = _cscg(rng, occupied.size, 1.0)
            symbols = _qam4(rng, (captures, occupied.size))
            bins[:, occupied] += np.sqrt(config.signal_var) * gains[np.newaxis, :] * symbols
    samples = ifft_unitary(bins).reshape(-1)
    if config.rssi_mode == "ideal":
        power_reading = config.total_power
    else:
        power_reading = float(np.mean(samples.real**2 + samples.imag**2)) * n
    return WindowCapture(
        samples=samples,
        occupancy=occupancy,
        power_reading=power_reading,
        window_index=window_index,
    )


def one_bit_quantize(samples: np.ndarray) -> np.ndarray:
    """Sign-capture each complex sample onto the alphabet {+-1 +- 1j}.

    sign(0) maps to +1 so the operation is deterministic; every output
    sample has |x|^2 = 2 exactly, and the map is idempotent.
    """
    return one_bit_signs(samples)


def scaled_spectrum(capture: np.ndarray, power_reading: float) -> np.ndarray:
    """Unitary forward transform of sign samples, rescaled to total power.

    The sqrt(power/(2N)) factor undoes the per-sample power of 2 carried by
    sign samples, so each capture's spectrum satisfies
    sum_n |Y_n|^2 == power_reading exactly (Parseval).
    """
    capture = np.asarray(capture, dtype=np.complex128)
    if not power_reading > 0.0:
        raise ValueError(f"power_reading must be positive, got {power_reading!r}")
    n = capture.shape[-1]
    return np.sqrt(power_reading / (2.0 * n)) * fft_unitary(capture)


def unquantized_spectrum(capture: np.ndarray) -> np.ndarray:
    """Unitary forward transform of raw samples (full-precision baseline)."""
    return fft_unitary(np.asarray(capture, dtype=np.complex128))


def energy_statistics(bins: np.ndarray, avg_captures: int | None = None) -> np.ndarray:
    """Per-sub-band average energy over the captures of one window."""
    bins = np.asarray(bins)
    if bins.ndim != 2:
        raise ValueError("bins must be a 2-D (captures x subbands) array")
    if avg_captures is not None and bins.shape[0] != avg_captures:
        raise ValueError(f"window holds {bins.shape[0]} captures, expected {avg_captures}")
    return mean_power(bins)


def detect(stats: np.ndarray, threshold: float) -> np.ndarray:
    """Occupancy decisions: True where the statistic strictly exceeds the
    threshold; a statistic equal to the threshold stays a vacancy call."""
    return np.asarray(stats, dtype=np.float64) > threshold


def window_statistics(capture: WindowCapture, config: SensingConfig) -> np.ndarray:
    """Run the configured receive chain on one window and return Z.

    Delegates to the fused window kernel; equivalent (bit for bit) to
    composing one_bit_quantize / scaled_spectrum / unquantized_spectrum and
    energy_statistics by hand.
    """
    captures = capture.captures(config.n_subbands)
    if captures.shape[0] != config.avg_captures:
        raise ValueError(
            f"window holds {captures.shape[0]} captures, expected {config.avg_captures}"
        )
    return window_energy(captures, capture.power_reading, config.quantizer == "one-bit")


def spectrum_window(capture: WindowCapture, config: SensingConfig) -> SpectrumWindow:
    """Like window_statistics, but packaged with the per-capture bins."""
    captures = capture.captures(config.n_subbands)
    if config.quantizer == "one-bit":
        bins = scaled_spectrum(one_bit_quantize(captures), capture.power_reading)
    else:
        bins = unquantized_spectrum(captures)
    return SpectrumWindow.from_bins(bins)


def write_window_dump(path, capture: WindowCapture, config: SensingConfig, seed: int) -> None:
    """Dump a window as little-endian interleaved float64 I/Q.

    Layout: a 32-byte header (magic "OBWS", version, N, L, M, seed) followed
    by re,im pairs for all L*N samples.  Used for golden-vector tests.
    """
    header = _DUMP_HEADER.pack(
        DUMP_MAGIC,
        DUMP_VERSION,
        config.n_subbands,
        config.avg_captures,
        config.m_occupied,
        int(seed) & _SEED_MASK,
    )
    interleaved = np.empty(2 * capture.samples.size, dtype="<f8")
    interleaved[0::2] = capture.samples.real
    interleaved[1::2] = capture.samples.imag
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(interleaved.tobytes())


def read_window_dump(path):
    """Read a window dump; returns (samples, meta) with meta holding the
    header fields n_subbands, avg_captures, m_occupied and seed."""
    with open(path, "rb") as fh:
        header = fh.read(_DUMP_HEADER.size)
        if len(header) != _DUMP_HEADER.size:
            raise ValueError(f"{path}: truncated header")
        magic, version, n, captures, occupied, seed = _DUMP_HEADER.unpack(header)
        if magic != DUMP_MAGIC:
            raise ValueError(f"{path}: bad magic {magic!r}")
        if version != DUMP_VERSION:
            raise ValueError(f"{path}: unsupported version {version}")
        payload = np.frombuffer(fh.read(), dtype="<f8")
    expected = 2 * n * captures
    if payload.size != expected:
        raise ValueError(f"{path}: expected {expected} floats, found {payload.size}")
    samples = payload[0::2] + 1j * payload[1::2]
    meta = {"n_subbands": n, "avg_captures": captures, "m_occupied": occupied, "seed": seed}
    return samples, meta
