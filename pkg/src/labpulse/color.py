"""sRGB to CIELAB conversion.

Fixed conventions: D65 reference white, 2 degree observer, the piecewise
sRGB transfer function (linear segment below 0.04045), and the sRGB
linear-RGB-to-XYZ matrix.  a* and b* are kept as signed floats; L is in
[0, 100] for any valid 8-bit input.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Linear sRGB -> XYZ (D65), rows X/Y/Z.  White (1,1,1) maps to the
# reference white below to ~1e-7, which pins white at L=100, a*=b*=0.
SRGB_TO_XYZ = np.array(
    [
        [0.4124564, 0.3575761, 0.1804375],
        [0.2126729, 0.7151522, 0.0721750],
        [0.0193339, 0.1191920, 0.9503041],
    ]
)
XYZ_TO_SRGB = np.linalg.inv(SRGB_TO_XYZ)

# D65 white point, 2 degree observer, Y normalized to 1.
WHITE_X = 0.95047
WHITE_Y = 1.0
WHITE_Z = 1.08883

# CIELAB cube-root law switches to a linear segment below (6/29)^3.
_LAB_DELTA = 6.0 / 29.0
_LAB_T0 = _LAB_DELTA**3
_LAB_SLOPE = 1.0 / (3.0 * _LAB_DELTA**2)
_LAB_OFFSET = 4.0 / 29.0


@dataclass(frozen=True)
class RgbFrame:
    """One video frame of 8-bit sRGB pixels, shape (height, width, 3)."""

    pixels: np.ndarray

    def __post_init__(self):
        px = np.asarray(self.pixels, dtype=np.uint8)
        if px.ndim != 3 or px.shape[2] != 3:
            raise ValueError(f"expected (height, width, 3) pixels, got {px.shape}")
        object.__setattr__(self, "pixels", px)

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]


@dataclass(frozen=True)
class LabFrame:
    """One frame of CIELAB triples, shape (height, width, 3) float64.

    Channel 0 is L, channel 1 is a*, channel 2 is b*.
    """

    pixels: np.ndarray

    def __post_init__(self):
        px = np.asarray(self.pixels, dtype=np.float64)
        if px.ndim != 3 or px.shape[2] != 3:
            raise ValueError(f"expected (height, width, 3) pixels, got {px.shape}")
        object.__setattr__(self, "pixels", px)

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def a_star(self) -> np.ndarray:
        """The a* plane, shape (height, width)."""
        return self.pixels[:, :, 1]


def _gamma_expand(v: float) -> float:
    if v <= 0.04045:
        return v / 12.92
    return ((v + 0.055) / 1.055) ** 2.4


def _gamma_compress(v: float) -> float:
    if v <= 0.0031308:
        return v * 12.92
    return 1.055 * v ** (1.0 / 2.4) - 0.055


def _lab_f(t: float) -> float:
    if t > _LAB_T0:
        return t ** (1.0 / 3.0)
    return _LAB_SLOPE * t + _LAB_OFFSET


def _lab_f_inv(f: float) -> float:
    if f > _LAB_DELTA:
        return f**3
    return (f - _LAB_OFFSET) / _LAB_SLOPE


def srgb_to_lab(rgb: tuple[int, int, int]) -> tuple[float, float, float]:
    """Convert one 8-bit sRGB triple to (L, a*, b*)."""
    r = _gamma_expand(rgb[0] / 255.0)
    g = _gamma_expand(rgb[1] / 255.0)
    b = _gamma_expand(rgb[2] / 255.0)
    m = SRGB_TO_XYZ
    x = m[0, 0] * r + m[0, 1] * g + m[0, 2] * b
    y = m[1, 0] * r + m[1, 1] * g + m[1, 2] * b
    z = m[2, 0] * r + m[2, 1] * g + m[2, 2] * b
    fx = _lab_f(x / WHITE_X)
    fy = _lab_f(y / WHITE_Y)
    fz = _lab_f(z / WHITE_Z)
    return (116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz))


def lab_to_srgb(lab: tuple[float, float, float]) -> tuple[int, int, int]:
    """Invert :func:`srgb_to_lab`, clamping to the 8-bit sRGB gamut.

    Used by the synthetic generator to encode a target a* value into
    frame pixels; quantization to 8 bits is intentional.
    """
    l_star, a_star, b_star = lab
    fy = (l_star + 16.0) / 116.0
    fx = fy + a_star / 500.0
    fz = fy - b_star / 200.0
    x = _lab_f_inv(fx) * WHITE_X
    y = _lab_f_inv(fy) * WHITE_Y
    z = _lab_f_inv(fz) * WHITE_Z
    m = XYZ_TO_SRGB
    lin = (
        m[0, 0] * x + m[0, 1] * y + m[0, 2] * z,
        m[1, 0] * x + m[1, 1] * y + m[1, 2] * z,
        m[2, 0] * x + m[2, 1] * y + m[2, 2] * z,
    )
    out = []
    for v in lin:
        v = min(max(v, 0.0), 1.0)
        out.append(int(round(_gamma_compress(v) * 255.0)))
    return (out[0], out[1], out[2])


def convert_frame(frame: RgbFrame) -> LabFrame:
    """Convert a whole frame to CIELAB, preserving dimensions."""
    # Imported here so the compiled-vs-fallback kernel selection stays
    # out of the module import graph.
    from .kernels import frame_to_lab

    return LabFrame(frame_to_lab(frame.pixels))
