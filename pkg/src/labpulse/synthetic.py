"""Ground-truth-controlled synthetic inputs for pipeline verification.

Signals are unit-amplitude sinusoids whose instantaneous frequency
follows a piecewise-linear BPM trajectory.  Phase is accumulated sample
by sample (phi += 2*pi*f/rate) rather than frequency-stepped, so the
waveform stays continuous across trajectory breakpoints.  Distortions
model the artifacts discussed for real captures: additive white noise,
a slow brightness ramp, and short motion bursts that put transient
off-ridge peaks into the spectrum.

generate_frames re-encodes the pulsating a* value into small sRGB
frames around a fixed skin-tone base color so the whole frame-input
path (color conversion, rasterization, aggregation) can be exercised
end to end; 8-bit quantization error is part of the test realism.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .color import RgbFrame, lab_to_srgb, srgb_to_lab
from .errors import ConfigError
from .roi import CellSpec, CellSignalSeries, LandmarkFrame

# Burst length of one synthetic motion spike, seconds.
SPIKE_DURATION_S = 0.8


@dataclass(frozen=True)
class HrTrajectory:
    """Piecewise-linear heart-rate course: (time_s, bpm) breakpoints."""

    breakpoints: tuple[tuple[float, float], ...]

    def __post_init__(self):
        bp = tuple((float(t), float(b)) for t, b in self.breakpoints)
        if not bp:
            raise ConfigError("trajectory needs at least one breakpoint")
        times = [t for t, _ in bp]
        if any(t2 <= t1 for t1, t2 in zip(times, times[1:])):
            raise ConfigError("breakpoint times must be strictly increasing")
        object.__setattr__(self, "breakpoints", bp)

    @classmethod
    def constant(cls, bpm: float, duration: float) -> "HrTrajectory":
        return cls(((0.0, bpm), (duration, bpm)))

    @classmethod
    def ramp(cls, bpm_start: float, bpm_end: float, duration: float) -> "HrTrajectory":
        return cls(((0.0, bpm_start), (duration, bpm_end)))

    def bpm_at(self, t: np.ndarray) -> np.ndarray:
        times = np.array([p[0] for p in self.breakpoints])
        bpms = np.array([p[1] for p in self.breakpoints])
        return np.interp(t, times, bpms)

    def span(self) -> tuple[float, float]:
        return self.breakpoints[0][0], self.breakpoints[-1][0]

    def check_band(self, low: float, high: float) -> None:
        bpms = [b for _, b in self.breakpoints]
        if min(bpms) < low or max(bpms) > high:
            raise ConfigError(
                f"trajectory BPM range [{min(bpms)}, {max(bpms)}] leaves the band [{low}, {high}]"
            )


@dataclass(frozen=True)
class DistortionSpec:
    """Distortion magnitudes; all zero means a clean signal."""

    additive_noise_sigma: float = 0.0
    luminosity_ramp_amplitude: float = 0.0
    motion_spike_rate: float = 0.0  # events per minute
    motion_spike_amplitude: float = 0.0

    def __post_init__(self):
        for name in (
            "additive_noise_sigma",
            "luminosity_ramp_amplitude",
            "motion_spike_rate",
            "motion_spike_amplitude",
        ):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name} must be non-negative")


@dataclass(frozen=True)
class GeometrySpec:
    """Frame size, static landmarks and cells for frame generation."""

    width: int = 64
    height: int = 64
    landmarks: np.ndarray = field(
        default_factory=lambda: np.array(
            # A centered square cell plus four unused outer points, so
            # the landmark stream is not trivially identical to the
            # cell polygon.
            [
                [0.25, 0.25],
                [0.75, 0.25],
                [0.75, 0.75],
                [0.25, 0.75],
                [0.05, 0.05],
                [0.95, 0.05],
                [0.95, 0.95],
                [0.05, 0.95],
            ]
        )
    )
    cells: tuple[CellSpec, ...] = (CellSpec(0, (0, 1, 2, 3), "synthetic-square"),)
    base_rgb: tuple[int, int, int] = (196, 132, 116)  # warm skin tone
    pulse_a_amplitude: float = 2.5
    background_rgb: tuple[int, int, int] = (120, 120, 124)


def _phase(traj: HrTrajectory, frame_rate: float, n: int) -> np.ndarray:
    t = np.arange(n) / frame_rate
    freq_hz = traj.bpm_at(t) / 60.0
    # Accumulated phase; sample 0 starts at phase 0.
    return np.concatenate(([0.0], np.cumsum(2.0 * np.pi * freq_hz[:-1] / frame_rate)))


def _spike_track(
    distortion: DistortionSpec,
    frame_rate: float,
    n: int,
    rng: np.random.Generator,
    band: tuple[float, float] = (50.0, 150.0),
) -> np.ndarray:
    """Short Hann-enveloped bursts at random in-band frequencies."""
    track = np.zeros(n)
    duration = n / frame_rate
    count = int(round(distortion.motion_spike_rate * duration / 60.0))
    if count == 0 or distortion.motion_spike_amplitude == 0.0:
        return track
    burst_len = max(2, int(round(SPIKE_DURATION_S * frame_rate)))
    starts = rng.uniform(0, max(duration - SPIKE_DURATION_S, 0.0), size=count)
    freqs = rng.uniform(band[0] / 60.0, band[1] / 60.0, size=count)
    envelope = np.hanning(burst_len)
    tt = np.arange(burst_len) / frame_rate
    for start, f in zip(starts, freqs):
        i0 = int(round(start * frame_rate))
        i1 = min(i0 + burst_len, n)
        burst = distortion.motion_spike_amplitude * envelope * np.sin(2.0 * np.pi * f * tt)
        track[i0:i1] += burst[: i1 - i0]
    return track


def _lum_ramp(amplitude: float, n: int) -> np.ndarray:
    """One linear sweep from -amplitude/2 to +amplitude/2."""
    if n == 1:
        return np.zeros(1)
    return amplitude * (np.arange(n) / (n - 1) - 0.5)


def generate_signal(
    traj: HrTrajectory,
    frame_rate: float,
    duration: float,
    distortion: DistortionSpec = DistortionSpec(),
    rng_seed: int = 0,
) -> CellSignalSeries:
    """A distorted unit-amplitude pulse signal, deterministic per seed."""
    t0, t1 = traj.span()
    if duration > t1 - t0 + 1e-9:
        raise ConfigError(f"trajectory spans {t1 - t0} s but {duration} s were requested")
    n = int(round(duration * frame_rate))
    rng = np.random.default_rng(rng_seed)
    x = np.sin(_phase(traj, frame_rate, n))
    x += _lum_ramp(distortion.luminosity_ramp_amplitude, n)
    x += _spike_track(distortion, frame_rate, n, rng)
    if distortion.additive_noise_sigma > 0:
        x += distortion.additive_noise_sigma * rng.standard_normal(n)
    return CellSignalSeries(cell_id=0, samples=x, frame_rate=frame_rate)


def generate_frames(
    traj: HrTrajectory,
    distortion: DistortionSpec,
    geometry: GeometrySpec,
    frame_rate: float,
    duration: float,
    rng_seed: int = 0,
) -> tuple[list[RgbFrame], list[LandmarkFrame]]:
    """sRGB frames whose in-cell pixels pulse in a*, plus the matching
    static landmark stream."""
    if not geometry.cells:
        raise ConfigError("geometry defines no cells")
    n = int(round(duration * frame_rate))
    rng = np.random.default_rng(rng_seed)
    base_lab = srgb_to_lab(geometry.base_rgb)
    pulse = geometry.pulse_a_amplitude * np.sin(_phase(traj, frame_rate, n))
    pulse += _spike_track(distortion, frame_rate, n, rng)
    if distortion.additive_noise_sigma > 0:
        pulse += distortion.additive_noise_sigma * rng.standard_normal(n)
    brightness = 1.0 + _lum_ramp(distortion.luminosity_ramp_amplitude, n)

    landmarks = [LandmarkFrame(i, geometry.landmarks) for i in range(n)]
    cell_mask = _geometry_mask(geometry, landmarks[0])

    frames = []
    for i in range(n):
        skin = lab_to_srgb((base_lab[0], base_lab[1] + pulse[i], base_lab[2]))
        frame = np.empty((geometry.height, geometry.width, 3), dtype=np.uint8)
        frame[:, :] = geometry.background_rgb
        frame[cell_mask] = skin
        if brightness[i] != 1.0:
            frame = _scale_brightness(frame, brightness[i])
        frames.append(RgbFrame(frame))
    return frames, landmarks


def _geometry_mask(geometry: GeometrySpec, lm: LandmarkFrame) -> np.ndarray:
    from .roi import _cell_mask

    mask = np.zeros((geometry.height, geometry.width), dtype=bool)
    for cell in geometry.cells:
        mask |= _cell_mask(cell, lm, geometry.width, geometry.height).astype(bool)
    return mask


def _scale_brightness(frame: np.ndarray, factor: float) -> np.ndarray:
    """Scale linear light by ``factor`` and re-encode, clamping to gamut."""
    from .color import _gamma_compress, _gamma_expand

    lut = np.array(
        [
            round(min(max(_gamma_compress(_gamma_expand(v / 255.0) * factor), 0.0), 1.0) * 255.0)
            for v in range(256)
        ],
        dtype=np.uint8,
    )
    return lut[frame]
