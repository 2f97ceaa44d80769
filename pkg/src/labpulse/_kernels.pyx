# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled hot kernels: polygon scanline rasterization and per-pixel
sRGB -> CIELAB conversion.

Cell rasterization dominates pipeline runtime, so it gets a C inner
loop.  The arithmetic must stay expression-for-expression identical to
labpulse._kernels_py (the pure NumPy fallback); the color constants
below are the ones from labpulse.color.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport ceil, floor, pow

cnp.import_array()

# Constants mirrored from labpulse.color (D65, 2 degree observer).
cdef double M00 = 0.4124564, M01 = 0.3575761, M02 = 0.1804375
cdef double M10 = 0.2126729, M11 = 0.7151522, M12 = 0.0721750
cdef double M20 = 0.0193339, M21 = 0.1191920, M22 = 0.9503041
cdef double WX = 0.95047, WY = 1.0, WZ = 1.08883
cdef double LAB_T0 = (6.0 / 29.0) ** 3
cdef double LAB_SLOPE = 1.0 / (3.0 * (6.0 / 29.0) ** 2)
cdef double LAB_OFFSET = 4.0 / 29.0

cdef double[256] GAMMA_LUT

cdef void _init_gamma_lut():
    cdef int i
    cdef double v
    for i in range(256):
        v = i / 255.0
        if v <= 0.04045:
            GAMMA_LUT[i] = v / 12.92
        else:
            GAMMA_LUT[i] = pow((v + 0.055) / 1.055, 2.4)

_init_gamma_lut()


cdef inline double _lab_f(double t) nogil:
    if t > LAB_T0:
        return pow(t, 1.0 / 3.0)
    return LAB_SLOPE * t + LAB_OFFSET


def frame_to_lab(cnp.ndarray[cnp.uint8_t, ndim=3] rgb):
    """Convert an (H, W, 3) uint8 sRGB frame to (H, W, 3) float64 Lab."""
    cdef Py_ssize_t h = rgb.shape[0]
    cdef Py_ssize_t w = rgb.shape[1]
    cdef cnp.ndarray[cnp.float64_t, ndim=3] out = np.empty((h, w, 3), dtype=np.float64)
    cdef Py_ssize_t i, j
    cdef double r, g, b, x, y, z, fx, fy, fz
    for i in range(h):
        for j in range(w):
            r = GAMMA_LUT[rgb[i, j, 0]]
            g = GAMMA_LUT[rgb[i, j, 1]]
            b = GAMMA_LUT[rgb[i, j, 2]]
            x = (M00 * r + M01 * g + M02 * b) / WX
            y = (M10 * r + M11 * g + M12 * b) / WY
            z = (M20 * r + M21 * g + M22 * b) / WZ
            fx = _lab_f(x)
            fy = _lab_f(y)
            fz = _lab_f(z)
            out[i, j, 0] = 116.0 * fy - 16.0
            out[i, j, 1] = 500.0 * (fx - fy)
            out[i, j, 2] = 200.0 * (fy - fz)
    return out


def rasterize_mask(px, py, int width, int height):
    """Scanline-fill a polygon onto a (height, width) uint8 mask.

    Same semantics as the fallback: a pixel is set when its center lies
    inside the polygon under the even-odd rule or exactly on the
    boundary.  Edge crossings use the half-open [min(y), max(y)) rule.
    """
    cdef cnp.ndarray[cnp.float64_t, ndim=1] vx = np.ascontiguousarray(px, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] vy = np.ascontiguousarray(py, dtype=np.float64)
    cdef Py_ssize_t n = vx.shape[0]
    cdef cnp.ndarray[cnp.uint8_t, ndim=2] mask = np.zeros((height, width), dtype=np.uint8)
    if n < 3:
        return mask

    # Boundary spans and crossings for one scanline; 2n slots suffice.
    cdef cnp.ndarray[cnp.float64_t, ndim=1] cross = np.empty(2 * n, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] span_lo = np.empty(2 * n, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] span_hi = np.empty(2 * n, dtype=np.float64)

    cdef double ymin = vy[0], ymax = vy[0]
    cdef Py_ssize_t i
    for i in range(1, n):
        if vy[i] < ymin:
            ymin = vy[i]
        if vy[i] > ymax:
            ymax = vy[i]

    cdef int row_lo = <int>floor(ymin - 0.5)
    cdef int row_hi = <int>ceil(ymax - 0.5)
    if row_lo < 0:
        row_lo = 0
    if row_hi > height - 1:
        row_hi = height - 1

    cdef int row, c0, c1
    cdef Py_ssize_t nc, ns, j, k
    cdef double yc, x1, y1, x2, y2, xv, tmp, lo, hi
    for row in range(row_lo, row_hi + 1):
        yc = row + 0.5
        nc = 0
        ns = 0
        for i in range(n):
            x1 = vx[i]
            y1 = vy[i]
            x2 = vx[(i + 1) % n]
            y2 = vy[(i + 1) % n]
            if y1 == y2:
                if y1 == yc:
                    span_lo[ns] = x1 if x1 < x2 else x2
                    span_hi[ns] = x2 if x1 < x2 else x1
                    ns += 1
                continue
            if (y1 <= yc < y2) or (y2 <= yc < y1):
                cross[nc] = x1 + (yc - y1) * (x2 - x1) / (y2 - y1)
                nc += 1
            elif yc == (y1 if y1 > y2 else y2):
                xv = x1 if y1 > y2 else x2
                span_lo[ns] = xv
                span_hi[ns] = xv
                ns += 1
        # insertion sort; polygons are small
        for j in range(1, nc):
            tmp = cross[j]
            k = j
            while k > 0 and cross[k - 1] > tmp:
                cross[k] = cross[k - 1]
                k -= 1
            cross[k] = tmp
        for j in range(0, nc - 1, 2):
            span_lo[ns] = cross[j]
            span_hi[ns] = cross[j + 1]
            ns += 1
        for j in range(ns):
            lo = span_lo[j]
            hi = span_hi[j]
            c0 = <int>ceil(lo - 0.5)
            c1 = <int>floor(hi - 0.5)
            if c0 < 0:
                c0 = 0
            if c1 > width - 1:
                c1 = width - 1
            for k in range(c0, c1 + 1):
                mask[row, k] = 1
    return mask
