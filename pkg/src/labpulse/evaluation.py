"""Reference-curve processing and MAE scoring.

The contact reference recording is clean enough that a per-column
argmax over the same sliding-FFT machinery (window and stride rescaled
from video frames to reference samples) gives its heart-rate curve; the
polyline fit is reserved for the camera signal.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import EmptyPairing, EmptySpectrogram, NoOverlap
from .spectrogram import StftConfig, compute_spectrogram


@dataclass(frozen=True)
class ReferenceRecording:
    """Contact-sensor amplitude series, sample_rate in Hz, start_offset
    in seconds relative to the video start."""

    samples: np.ndarray
    sample_rate: float
    start_offset: float = 0.0

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=np.float64)
        if not np.all(np.isfinite(s)):
            raise ValueError("reference samples must be finite")
        if self.sample_rate <= 0:
            raise ValueError("sample_rate must be positive")
        object.__setattr__(self, "samples", s)


@dataclass(frozen=True)
class HeartRateCurve:
    """BPM estimates over strictly increasing timestamps (seconds)."""

    times: np.ndarray
    bpm: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.times, dtype=np.float64)
        b = np.asarray(self.bpm, dtype=np.float64)
        if t.shape != b.shape or t.ndim != 1:
            raise ValueError("times and bpm must be 1-d and equally long")
        if len(t) > 1 and not np.all(np.diff(t) > 0):
            raise ValueError("times must be strictly increasing")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "bpm", b)


@dataclass(frozen=True)
class AlignedPairs:
    """Video and reference BPM sampled on a shared time axis."""

    times: np.ndarray
    video_bpm: np.ndarray
    reference_bpm: np.ndarray

    def __len__(self) -> int:
        return len(self.times)


def reference_hr(rec: ReferenceRecording, config: StftConfig) -> HeartRateCurve:
    """Heart-rate curve of the reference signal by per-column argmax.

    The window and stride are rescaled so they cover the same durations
    at the reference sample rate as they do at the video frame rate.
    Raises SignalTooShort / EmptySpectrogram via the spectrogram path.
    """
    scale = rec.sample_rate / config.frame_rate
    scaled = replace(
        config,
        window_length=max(2, int(round(config.window_length * scale))),
        stride=max(1, int(round(config.stride * scale))),
        frame_rate=rec.sample_rate,
    )
    spec = compute_spectrogram(rec.samples, scaled)
    col_max = spec.powers.max(axis=0)
    if not np.any(col_max > 0):
        raise EmptySpectrogram("reference spectrogram is all zero (constant signal?)")
    ridge_bins = spec.powers.argmax(axis=0)
    keep = col_max > 0
    times = spec.time_s[keep] + rec.start_offset
    return HeartRateCurve(times=times, bpm=spec.freq_bpm[ridge_bins[keep]])


def align(video_curve: HeartRateCurve, ref_curve: HeartRateCurve) -> AlignedPairs:
    """Interpolate the reference onto the video timestamps.

    Video samples outside the reference's span are dropped; raises
    NoOverlap when nothing remains.
    """
    lo = ref_curve.times[0]
    hi = ref_curve.times[-1]
    keep = (video_curve.times >= lo) & (video_curve.times <= hi)
    if not np.any(keep):
        raise NoOverlap(
            f"video span [{video_curve.times[0]:.2f}, {video_curve.times[-1]:.2f}] s "
            f"does not meet reference span [{lo:.2f}, {hi:.2f}] s"
        )
    times = video_curve.times[keep]
    ref_bpm = np.interp(times, ref_curve.times, ref_curve.bpm)
    return AlignedPairs(times=times, video_bpm=video_curve.bpm[keep], reference_bpm=ref_bpm)


def mae(pairs: AlignedPairs) -> float:
    """Mean absolute BPM difference over the aligned samples."""
    if len(pairs) == 0:
        raise EmptyPairing("no aligned samples")
    return float(np.mean(np.abs(pairs.video_bpm - pairs.reference_bpm)))
