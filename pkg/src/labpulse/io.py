"""File formats consumed and produced by the pipeline.

Landmarks: newline-delimited JSON, one object per frame, either
{"frame": i, "points": [[x, y], ...]} with normalized coordinates or
{"frame": i, "missing": true} for frames without a detected face.

Frames: a directory of numbered PNGs (000000.png, 000001.png, ...) or a
single raw stream: 20-byte header (magic RPRF, u32 width, u32 height,
u32 frame_count, f32 fps, little-endian) followed by tightly packed
8-bit RGB frames.

Curves: CSV with a 'time_seconds,bpm' header, '.' decimals, '\\n' line
endings; float fields use repr so identical runs are byte-identical.

Reference recordings: two-column text (time_seconds amplitude),
whitespace or comma separated, optional header line.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path
from typing import Iterator

import numpy as np
from PIL import Image

from .color import RgbFrame
from .errors import InputMissing, ParseError
from .evaluation import HeartRateCurve, ReferenceRecording
from .roi import LandmarkFrame

RAW_STREAM_MAGIC = b"RPRF"


# -- landmarks ---------------------------------------------------------


def read_landmarks(path: str | Path) -> list[LandmarkFrame | None]:
    """Load a landmark stream; None entries mark missing-face frames.

    Validates contiguous frame indices from 0 and a constant point
    count across the recording.
    """
    path = Path(path)
    if not path.exists():
        raise InputMissing(f"landmark file not found: {path}")
    frames: list[LandmarkFrame | None] = []
    n_points = None
    for lineno, line in enumerate(path.read_text().splitlines(), start=1):
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
        except json.JSONDecodeError as e:
            raise ParseError(f"{path}:{lineno}: {e}") from e
        if not isinstance(rec, dict) or "frame" not in rec:
            raise ParseError(f"{path}:{lineno}: expected an object with a 'frame' key")
        if int(rec["frame"]) != len(frames):
            raise ParseError(
                f"{path}:{lineno}: frame index {rec['frame']} out of order (expected {len(frames)})"
            )
        if rec.get("missing"):
            frames.append(None)
            continue
        try:
            lm = LandmarkFrame(int(rec["frame"]), np.array(rec["points"], dtype=np.float64))
        except (KeyError, ValueError) as e:
            raise ParseError(f"{path}:{lineno}: {e}") from e
        if n_points is None:
            n_points = len(lm.points)
        elif len(lm.points) != n_points:
            raise ParseError(
                f"{path}:{lineno}: point count {len(lm.points)} differs from {n_points}"
            )
        frames.append(lm)
    if not frames:
        raise ParseError(f"{path}: no landmark records")
    return frames


def write_landmarks(frames: list[LandmarkFrame | None], path: str | Path) -> None:
    with open(path, "w") as fh:
        for i, lm in enumerate(frames):
            if lm is None:
                fh.write(json.dumps({"frame": i, "missing": True}) + "\n")
            else:
                points = [[float(x), float(y)] for x, y in lm.points]
                fh.write(json.dumps({"frame": i, "points": points}) + "\n")


# -- frames ------------------------------------------------------------


def iter_frames(path: str | Path) -> Iterator[RgbFrame]:
    """Yield frames from a PNG directory or a raw stream file."""
    path = Path(path)
    if not path.exists():
        raise InputMissing(f"frame input not found: {path}")
    if path.is_dir():
        yield from _iter_png_dir(path)
    else:
        yield from _iter_raw_stream(path)


def count_frames(path: str | Path) -> int:
    path = Path(path)
    if not path.exists():
        raise InputMissing(f"frame input not found: {path}")
    if path.is_dir():
        return len(_png_paths(path))
    with open(path, "rb") as fh:
        _, _, count, _ = _read_raw_header(fh, path)
    return count


def _png_paths(path: Path) -> list[Path]:
    pngs = sorted(path.glob("*.png"))
    if not pngs:
        raise InputMissing(f"no .png frames in {path}")
    return pngs


def _iter_png_dir(path: Path) -> Iterator[RgbFrame]:
    for p in _png_paths(path):
        with Image.open(p) as img:
            yield RgbFrame(np.asarray(img.convert("RGB")))


def _read_raw_header(fh, path) -> tuple[int, int, int, float]:
    header = fh.read(20)
    if len(header) < 20 or header[:4] != RAW_STREAM_MAGIC:
        raise ParseError(f"{path}: not a raw frame stream (bad header)")
    width, height, count, fps = struct.unpack("<IIIf", header[4:])
    return width, height, count, fps


def _iter_raw_stream(path: Path) -> Iterator[RgbFrame]:
    with open(path, "rb") as fh:
        width, height, count, _ = _read_raw_header(fh, path)
        frame_bytes = width * height * 3
        for i in range(count):
            buf = fh.read(frame_bytes)
            if len(buf) < frame_bytes:
                raise ParseError(f"{path}: truncated at frame {i}")
            yield RgbFrame(np.frombuffer(buf, dtype=np.uint8).reshape(height, width, 3))


def raw_stream_fps(path: str | Path) -> float:
    with open(path, "rb") as fh:
        return _read_raw_header(fh, Path(path))[3]


def write_png_dir(frames, out_dir: str | Path) -> int:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    n = 0
    for i, frame in enumerate(frames):
        Image.fromarray(frame.pixels, mode="RGB").save(out_dir / f"{i:06d}.png")
        n += 1
    return n


def write_raw_stream(frames, fps: float, path: str | Path) -> int:
    frames = list(frames)
    if not frames:
        raise ValueError("no frames to write")
    h, w = frames[0].pixels.shape[:2]
    with open(path, "wb") as fh:
        fh.write(RAW_STREAM_MAGIC)
        fh.write(struct.pack("<IIIf", w, h, len(frames), fps))
        for frame in frames:
            fh.write(frame.pixels.tobytes(order="C"))
    return len(frames)


# -- curves and references ----------------------------------------------


def write_curve(curve: HeartRateCurve, path: str | Path) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write("time_seconds,bpm\n")
        for t, b in zip(curve.times, curve.bpm):
            fh.write(f"{float(t)!r},{float(b)!r}\n")


def read_curve(path: str | Path) -> HeartRateCurve:
    path = Path(path)
    if not path.exists():
        raise InputMissing(f"curve file not found: {path}")
    lines = path.read_text().splitlines()
    if not lines or lines[0].strip() != "time_seconds,bpm":
        raise ParseError(f"{path}: expected a 'time_seconds,bpm' header")
    times, bpm = [], []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != 2:
            raise ParseError(f"{path}:{lineno}: expected two comma-separated fields")
        try:
            times.append(float(parts[0]))
            bpm.append(float(parts[1]))
        except ValueError as e:
            raise ParseError(f"{path}:{lineno}: {e}") from e
    if not times:
        raise ParseError(f"{path}: no samples")
    return HeartRateCurve(times=np.array(times), bpm=np.array(bpm))


def read_reference(path: str | Path, start_offset: float = 0.0) -> ReferenceRecording:
    """Two-column time/amplitude text; the sample rate is derived from
    the (required uniform) time spacing."""
    path = Path(path)
    if not path.exists():
        raise InputMissing(f"reference file not found: {path}")
    times, amps = [], []
    for lineno, line in enumerate(path.read_text().splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        parts = stripped.replace(",", " ").split()
        if len(parts) != 2:
            raise ParseError(f"{path}:{lineno}: expected two columns")
        try:
            times.append(float(parts[0]))
            amps.append(float(parts[1]))
        except ValueError:
            if lineno == 1:  # header line
                continue
            raise ParseError(f"{path}:{lineno}: non-numeric sample") from None
    if len(times) < 2:
        raise ParseError(f"{path}: need at least two samples")
    t = np.array(times)
    dt = np.diff(t)
    if dt.min() <= 0 or (dt.max() - dt.min()) > 1e-6 * dt.mean() + 1e-9:
        raise ParseError(f"{path}: sample times must be uniform and increasing")
    rate = 1.0 / float(dt.mean())
    return ReferenceRecording(np.array(amps), sample_rate=rate, start_offset=start_offset + t[0])
