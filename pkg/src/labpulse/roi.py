"""Face-cell sampling: rasterize landmark polygons and aggregate a*.

Each cell is a polygon over landmark indices.  Per frame, the cell's
pixels are collected and reduced to one sample

    S_n = sqrt(sum of squared a* values over the cell's pixels)

optionally divided by sqrt(pixel count) so that cell area changes from
head motion do not modulate the signal (``normalize_by_pixel_count``,
on by default; off reproduces the raw unnormalized norm).
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from itertools import zip_longest
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .color import LabFrame
from .errors import ConfigError, DegenerateCell, EmptyCell, LengthMismatch
from .kernels import rasterize_mask

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class LandmarkFrame:
    """Tracked face points for one frame, normalized to [0, 1]."""

    frame_index: int
    points: np.ndarray  # (n_points, 2) float64

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.float64)
        if pts.ndim != 2 or pts.shape[1] != 2:
            raise ValueError(f"expected (n, 2) points, got {pts.shape}")
        if not np.all(np.isfinite(pts)):
            raise ValueError("landmark coordinates must be finite")
        object.__setattr__(self, "points", pts)


@dataclass(frozen=True)
class CellSpec:
    """A face cell: a simple polygon over landmark indices."""

    cell_id: int
    vertex_landmark_indices: tuple[int, ...]
    name: str = ""

    def __post_init__(self):
        idx = tuple(int(i) for i in self.vertex_landmark_indices)
        if len(idx) < 3:
            raise ValueError(f"cell {self.cell_id}: polygon needs >= 3 vertices")
        if any(i < 0 for i in idx):
            raise ValueError(f"cell {self.cell_id}: negative landmark index")
        object.__setattr__(self, "vertex_landmark_indices", idx)


@dataclass(frozen=True)
class CellSignalSeries:
    """Per-cell aggregated a* samples, one per frame."""

    cell_id: int
    samples: np.ndarray
    frame_rate: float

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=np.float64)
        object.__setattr__(self, "samples", s)

    def __len__(self) -> int:
        return len(self.samples)


def rasterize_cell(
    cell: CellSpec, landmarks: LandmarkFrame, width: int, height: int
) -> set[tuple[int, int]]:
    """Pixels whose centers fall inside the cell polygon at frame size.

    Landmark coordinates are scaled by (width, height); the pixel-center
    test uses the even-odd rule with boundary pixels counted as inside.
    Raises DegenerateCell when no pixel is covered (collapsed or
    off-frame polygon).
    """
    mask = _cell_mask(cell, landmarks, width, height)
    ys, xs = np.nonzero(mask)
    if len(xs) == 0:
        raise DegenerateCell(f"cell {cell.cell_id}: zero pixel area at frame {landmarks.frame_index}")
    return {(int(x), int(y)) for x, y in zip(xs, ys)}


def _cell_mask(cell: CellSpec, landmarks: LandmarkFrame, width: int, height: int) -> np.ndarray:
    idx = np.asarray(cell.vertex_landmark_indices)
    if idx.max() >= len(landmarks.points):
        raise ConfigError(
            f"cell {cell.cell_id} references landmark {idx.max()} "
            f"but frame {landmarks.frame_index} has {len(landmarks.points)}"
        )
    poly = landmarks.points[idx]
    xs = poly[:, 0] * width
    ys = poly[:, 1] * height
    # A collapsed polygon (collinear vertices) is degenerate even when
    # its outline happens to run through pixel centers.
    if _shoelace_area(xs, ys) == 0.0:
        return np.zeros((height, width), dtype=np.uint8)
    return rasterize_mask(xs, ys, width, height)


def _shoelace_area(xs: np.ndarray, ys: np.ndarray) -> float:
    return 0.5 * abs(float(np.sum(xs * np.roll(ys, -1) - np.roll(xs, -1) * ys)))


def aggregate_cell(lab: LabFrame, pixels: Iterable[tuple[int, int]]) -> float:
    """sqrt of the sum of squared a* values over the given (x, y) pixels."""
    pts = list(pixels)
    if not pts:
        raise EmptyCell("cannot aggregate an empty pixel set")
    xs = np.fromiter((p[0] for p in pts), dtype=np.intp, count=len(pts))
    ys = np.fromiter((p[1] for p in pts), dtype=np.intp, count=len(pts))
    if xs.min() < 0 or ys.min() < 0 or xs.max() >= lab.width or ys.max() >= lab.height:
        raise ValueError("pixel outside frame bounds")
    a = lab.pixels[ys, xs, 1]
    return float(np.sqrt(np.sum(a * a)))


def _aggregate_mask(a_plane: np.ndarray, mask: np.ndarray, normalize: bool) -> float | None:
    """Mask-based fast path of aggregate_cell; None when mask is empty."""
    count = int(mask.sum())
    if count == 0:
        return None
    a = a_plane[mask.astype(bool)]
    s = float(np.sqrt(np.sum(a * a)))
    if normalize:
        s /= np.sqrt(count)
    return s


def build_series(
    frames: Iterable[LabFrame],
    landmarks: Iterable[LandmarkFrame | None],
    cells: Sequence[CellSpec],
    frame_rate: float = 30.0,
    normalize_by_pixel_count: bool = True,
) -> list[CellSignalSeries]:
    """One aggregated series per cell over a frame sequence.

    A None landmark entry marks a frame where no face was found.  Frames
    where a cell is degenerate (collapsed polygon, off-frame, or a
    missing-landmark frame) hold the previous valid sample; leading gaps
    take the first valid value.  Raises LengthMismatch when the two
    sequences differ in length, DegenerateCell when a cell is never
    valid.
    """
    if not cells:
        raise ConfigError("no cells configured")
    per_cell: list[list[float | None]] = [[] for _ in cells]
    n_frames = 0
    sentinel = object()
    for lab, lm in zip_longest(frames, landmarks, fillvalue=sentinel):
        if lab is sentinel or lm is sentinel:
            raise LengthMismatch("frame and landmark sequences differ in length")
        n_frames += 1
        for ci, cell in enumerate(cells):
            if lm is None or len(lm.points) == 0:
                per_cell[ci].append(None)
                continue
            mask = _cell_mask(cell, lm, lab.width, lab.height)
            per_cell[ci].append(_aggregate_mask(lab.pixels[:, :, 1], mask, normalize_by_pixel_count))

    out = []
    for cell, raw in zip(cells, per_cell):
        filled, gaps = _fill_gaps(raw)
        if filled is None:
            raise DegenerateCell(f"cell {cell.cell_id}: no valid frame in the whole recording")
        if gaps:
            log.warning("cell %d: %d of %d frames gap-filled", cell.cell_id, gaps, n_frames)
        out.append(CellSignalSeries(cell.cell_id, np.array(filled), frame_rate=frame_rate))
    return out


def _fill_gaps(raw: list[float | None]) -> tuple[list[float] | None, int]:
    first_valid = next((v for v in raw if v is not None), None)
    if first_valid is None:
        return None, 0
    filled = []
    prev = first_valid
    gaps = 0
    for v in raw:
        if v is None:
            gaps += 1
            v = prev
        filled.append(v)
        prev = v
    return filled, gaps


def combine_series(series: Sequence[CellSignalSeries]) -> np.ndarray:
    """Element-wise mean of the per-cell series: the signal fed to the STFT."""
    if not series:
        raise ConfigError("no series to combine")
    return np.mean(np.stack([s.samples for s in series]), axis=0)


def load_cells(path: str | Path) -> list[CellSpec]:
    """Read cell polygons from a JSON file.

    Schema: a list of objects with integer ``cell_id``, a ``landmarks``
    list of >= 3 indices, and an optional ``name``.
    """
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as e:
        raise ConfigError(f"cell file {path}: {e}") from e
    if not isinstance(data, list):
        raise ConfigError(f"cell file {path}: expected a JSON list")
    cells = []
    for entry in data:
        try:
            cells.append(
                CellSpec(
                    cell_id=int(entry["cell_id"]),
                    vertex_landmark_indices=tuple(entry["landmarks"]),
                    name=str(entry.get("name", "")),
                )
            )
        except (KeyError, TypeError, ValueError) as e:
            raise ConfigError(f"cell file {path}: bad entry {entry!r}: {e}") from e
    return cells


def default_cells() -> list[CellSpec]:
    """The shipped 7-cell layout (see data/default_cells.json)."""
    from importlib.resources import files

    text = files("labpulse.data").joinpath("default_cells.json").read_text()
    data = json.loads(text)
    return [
        CellSpec(int(e["cell_id"]), tuple(e["landmarks"]), str(e.get("name", "")))
        for e in data
    ]
