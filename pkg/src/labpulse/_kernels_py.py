"""Pure NumPy implementations of the hot kernels.

These are the fallback used when the compiled extension is unavailable
(see :mod:`labpulse.kernels`).  The arithmetic mirrors the Cython kernels
expression for expression so both produce the same pixel sets and Lab
values to within float rounding.
"""

from __future__ import annotations

import numpy as np

from .color import (
    SRGB_TO_XYZ,
    WHITE_X,
    WHITE_Y,
    WHITE_Z,
    _LAB_OFFSET,
    _LAB_SLOPE,
    _LAB_T0,
    _gamma_expand,
)

# 8-bit sRGB -> linear, tabulated once.
_GAMMA_LUT = np.array([_gamma_expand(v / 255.0) for v in range(256)])


def frame_to_lab(rgb: np.ndarray) -> np.ndarray:
    """Convert an (H, W, 3) uint8 sRGB frame to (H, W, 3) float64 Lab."""
    lin = _GAMMA_LUT[rgb]
    m = SRGB_TO_XYZ
    r, g, b = lin[..., 0], lin[..., 1], lin[..., 2]
    x = (m[0, 0] * r + m[0, 1] * g + m[0, 2] * b) / WHITE_X
    y = (m[1, 0] * r + m[1, 1] * g + m[1, 2] * b) / WHITE_Y
    z = (m[2, 0] * r + m[2, 1] * g + m[2, 2] * b) / WHITE_Z
    fx = _lab_f_arr(x)
    fy = _lab_f_arr(y)
    fz = _lab_f_arr(z)
    out = np.empty(rgb.shape[:2] + (3,), dtype=np.float64)
    out[..., 0] = 116.0 * fy - 16.0
    out[..., 1] = 500.0 * (fx - fy)
    out[..., 2] = 200.0 * (fy - fz)
    return out


def _lab_f_arr(t: np.ndarray) -> np.ndarray:
    return np.where(t > _LAB_T0, np.power(t, 1.0 / 3.0), _LAB_SLOPE * t + _LAB_OFFSET)


def rasterize_mask(px: np.ndarray, py: np.ndarray, width: int, height: int) -> np.ndarray:
    """Scanline-fill a polygon onto a (height, width) uint8 mask.

    A pixel (col, row) is set when its center (col + 0.5, row + 0.5) lies
    inside the polygon under the even-odd rule, or exactly on its
    boundary.  Crossings use the half-open rule (an edge spans
    [min(y), max(y)) of its endpoints) so shared vertices are counted
    once; scanlines touching only an edge's upper endpoint or running
    along a horizontal edge are handled as boundary spans.
    """
    px = np.asarray(px, dtype=np.float64)
    py = np.asarray(py, dtype=np.float64)
    n = len(px)
    mask = np.zeros((height, width), dtype=np.uint8)
    if n < 3:
        return mask

    row_lo = max(0, int(np.floor(py.min() - 0.5)))
    row_hi = min(height - 1, int(np.ceil(py.max() - 0.5)))
    for row in range(row_lo, row_hi + 1):
        yc = row + 0.5
        crossings = []
        spans = []
        for i in range(n):
            x1, y1 = px[i], py[i]
            x2, y2 = px[(i + 1) % n], py[(i + 1) % n]
            if y1 == y2:
                if y1 == yc:
                    spans.append((min(x1, x2), max(x1, x2)))
                continue
            if (y1 <= yc < y2) or (y2 <= yc < y1):
                crossings.append(x1 + (yc - y1) * (x2 - x1) / (y2 - y1))
            elif yc == max(y1, y2):
                xv = x1 if y1 > y2 else x2
                spans.append((xv, xv))
        crossings.sort()
        for j in range(0, len(crossings) - 1, 2):
            spans.append((crossings[j], crossings[j + 1]))
        for lo, hi in spans:
            c0 = max(0, int(np.ceil(lo - 0.5)))
            c1 = min(width - 1, int(np.floor(hi - 0.5)))
            if c1 >= c0:
                mask[row, c0 : c1 + 1] = 1
    return mask
