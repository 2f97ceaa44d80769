"""Sliding-window FFT analysis of the aggregated a* signal.

Each analysis window is mean-subtracted (the band of interest starts at
50 BPM, so DC leakage through the taper would otherwise contaminate the
low bins), tapered with a Tukey window, and transformed with an
unnormalized forward real FFT (NumPy convention: sum of squared
magnitudes over all N bins equals N times the squared sample sum).  The
magnitude spectrum is cropped to bins whose center frequency lies in
the configured BPM band.

Column post-processing is split into explicit steps: normalize_columns
scales each time column to a max of 1, threshold_noise zeroes values
below the noise floor.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .errors import ConfigError, SignalTooShort

SPECTROGRAM_MAGIC = b"RPSG"


@dataclass(frozen=True)
class StftConfig:
    """Sliding-FFT parameters.

    window_length and stride are in samples; the band bounds are in BPM;
    noise_threshold applies to column-normalized magnitudes.
    """

    window_length: int = 512
    stride: int = 4
    tukey_shape: float = 0.5
    frame_rate: float = 30.0
    band_low: float = 50.0
    band_high: float = 150.0
    noise_threshold: float = 0.1

    def __post_init__(self):
        if self.window_length < 2:
            raise ConfigError("window_length must be >= 2")
        if not 0 < self.stride <= self.window_length:
            raise ConfigError("stride must satisfy 0 < stride <= window_length")
        if not 0.0 <= self.tukey_shape <= 1.0:
            raise ConfigError("tukey_shape must lie in [0, 1]")
        if self.frame_rate <= 0:
            raise ConfigError("frame_rate must be positive")
        if not self.band_low < self.band_high:
            raise ConfigError("band_low must be below band_high")
        if not 0.0 <= self.noise_threshold < 1.0:
            raise ConfigError("noise_threshold must lie in [0, 1)")


@dataclass(frozen=True)
class Spectrogram:
    """Band-cropped magnitudes: powers[k, l] over freq (BPM) x time (s)."""

    powers: np.ndarray  # (K, L) float64, >= 0
    freq_bpm: np.ndarray  # (K,)
    time_s: np.ndarray  # (L,)

    @property
    def n_bins(self) -> int:
        return self.powers.shape[0]

    @property
    def n_columns(self) -> int:
        return self.powers.shape[1]


def tukey_window(length: int, shape: float) -> np.ndarray:
    """Tapered-cosine window; shape 0 is rectangular, shape 1 is Hann."""
    if length < 2:
        raise ValueError("window length must be >= 2")
    if not 0.0 <= shape <= 1.0:
        raise ValueError("shape must lie in [0, 1]")
    if shape == 0.0:
        return np.ones(length)
    n = np.arange(length)
    edge = shape * (length - 1) / 2.0
    w = np.ones(length)
    rising = n < edge
    w[rising] = 0.5 * (1.0 + np.cos(np.pi * (n[rising] / edge - 1.0)))
    falling = n > (length - 1) - edge
    w[falling] = 0.5 * (1.0 + np.cos(np.pi * ((n[falling] - (length - 1)) / edge + 1.0)))
    return w


def compute_spectrogram(signal, config: StftConfig) -> Spectrogram:
    """Sliding mean-subtracted, Tukey-tapered FFT magnitudes, band-cropped.

    ``signal`` is a CellSignalSeries or a plain sample array; a series'
    frame_rate must agree with the config.  Produces
    floor((N - window_length) / stride) + 1 columns.  Raises
    SignalTooShort when the signal does not fill one window.
    """
    samples, rate = _coerce_signal(signal, config)
    n = len(samples)
    wl = config.window_length
    if n < wl:
        raise SignalTooShort(f"need at least {wl} samples, got {n}")
    win = tukey_window(wl, config.tukey_shape)

    segments = np.lib.stride_tricks.sliding_window_view(samples, wl)[:: config.stride]
    segments = segments - segments.mean(axis=1, keepdims=True)
    mags = np.abs(np.fft.rfft(segments * win, axis=1))  # (L, wl//2+1)

    bin_bpm = np.arange(wl // 2 + 1) * (rate / wl) * 60.0
    keep = (bin_bpm >= config.band_low) & (bin_bpm <= config.band_high)
    if not np.any(keep):
        raise ConfigError("no FFT bin falls inside the BPM band")
    n_cols = mags.shape[0]
    times = (np.arange(n_cols) * config.stride + wl / 2.0) / rate
    return Spectrogram(powers=mags[:, keep].T.copy(), freq_bpm=bin_bpm[keep], time_s=times)


def _coerce_signal(signal, config: StftConfig) -> tuple[np.ndarray, float]:
    samples = getattr(signal, "samples", signal)
    rate = getattr(signal, "frame_rate", config.frame_rate)
    if rate != config.frame_rate:
        raise ConfigError(
            f"series frame_rate {rate} does not match config frame_rate {config.frame_rate}"
        )
    return np.asarray(samples, dtype=np.float64), float(rate)


def normalize_columns(spec: Spectrogram) -> Spectrogram:
    """Scale each column to a maximum of 1; all-zero columns stay zero."""
    maxes = spec.powers.max(axis=0, keepdims=True)
    scale = np.where(maxes > 0, maxes, 1.0)
    return replace(spec, powers=spec.powers / scale)


def threshold_noise(spec: Spectrogram, threshold: float) -> Spectrogram:
    """Zero all values below ``threshold``; values at or above it pass."""
    return replace(spec, powers=np.where(spec.powers < threshold, 0.0, spec.powers))


def preprocess(signal, config: StftConfig) -> Spectrogram:
    """compute_spectrogram, then normalize and threshold: the ridge input."""
    spec = compute_spectrogram(signal, config)
    return threshold_noise(normalize_columns(spec), config.noise_threshold)


def write_spectrogram(spec: Spectrogram, path: str | Path) -> None:
    """Binary dump: 16-byte header (magic RPSG, u32 K, u32 L, u32
    reserved, little-endian), then row-major K x L float32 LE, plus a
    '<path>.axes.txt' sidecar with the two axes."""
    path = Path(path)
    k, length = spec.powers.shape
    with open(path, "wb") as fh:
        fh.write(SPECTROGRAM_MAGIC)
        fh.write(struct.pack("<III", k, length, 0))
        fh.write(spec.powers.astype("<f4").tobytes(order="C"))
    axes = Path(str(path) + ".axes.txt")
    with open(axes, "w") as fh:
        fh.write("freq_bpm " + " ".join(repr(float(v)) for v in spec.freq_bpm) + "\n")
        fh.write("time_s " + " ".join(repr(float(v)) for v in spec.time_s) + "\n")


def read_spectrogram(path: str | Path) -> Spectrogram:
    """Read a dump written by write_spectrogram (with its sidecar)."""
    raw = Path(path).read_bytes()
    if raw[:4] != SPECTROGRAM_MAGIC:
        raise ConfigError(f"{path}: bad magic {raw[:4]!r}")
    k, length, _ = struct.unpack("<III", raw[4:16])
    powers = np.frombuffer(raw[16:], dtype="<f4").reshape(k, length).astype(np.float64)
    axes_path = Path(str(path) + ".axes.txt")
    freq = np.zeros(k)
    times = np.zeros(length)
    if axes_path.exists():
        for line in axes_path.read_text().splitlines():
            name, *vals = line.split()
            if name == "freq_bpm":
                freq = np.array([float(v) for v in vals])
            elif name == "time_s":
                times = np.array([float(v) for v in vals])
    return Spectrogram(powers=powers, freq_bpm=freq, time_s=times)
