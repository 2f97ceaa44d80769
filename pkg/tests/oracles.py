"""Independent brute-force oracles shared by the module and acceptance
tests.

These deliberately avoid the production code paths: plain Python loops
and textbook formulas, so that agreement with the library is evidence
rather than tautology.
"""

from __future__ import annotations

import math

import numpy as np


def point_in_polygon(x: float, y: float, poly_x, poly_y) -> bool:
    """Even-odd ray cast with an explicit on-boundary check (boundary
    counts as inside)."""
    n = len(poly_x)
    if _on_boundary(x, y, poly_x, poly_y):
        return True
    inside = False
    for i in range(n):
        x1, y1 = poly_x[i], poly_y[i]
        x2, y2 = poly_x[(i + 1) % n], poly_y[(i + 1) % n]
        if (y1 <= y < y2) or (y2 <= y < y1):
            x_cross = x1 + (y - y1) * (x2 - x1) / (y2 - y1)
            if x_cross > x:
                inside = not inside
    return inside


def _on_boundary(x: float, y: float, poly_x, poly_y) -> bool:
    n = len(poly_x)
    for i in range(n):
        x1, y1 = poly_x[i], poly_y[i]
        x2, y2 = poly_x[(i + 1) % n], poly_y[(i + 1) % n]
        if min(x1, x2) <= x <= max(x1, x2) and min(y1, y2) <= y <= max(y1, y2):
            if (x2 - x1) * (y - y1) - (y2 - y1) * (x - x1) == 0.0:
                return True
    return False


def rasterize_bruteforce(poly_x, poly_y, width: int, height: int) -> set[tuple[int, int]]:
    """Test every pixel center against the polygon."""
    out = set()
    for row in range(height):
        for col in range(width):
            if point_in_polygon(col + 0.5, row + 0.5, poly_x, poly_y):
                out.add((col, row))
    return out


def tukey_direct(length: int, shape: float) -> np.ndarray:
    """Textbook tapered-cosine definition, evaluated pointwise."""
    w = np.empty(length)
    if shape <= 0.0:
        return np.ones(length)
    for n in range(length):
        u = n / (length - 1)
        if u < shape / 2.0:
            w[n] = 0.5 * (1.0 + math.cos(2.0 * math.pi / shape * (u - shape / 2.0)))
        elif u <= 1.0 - shape / 2.0:
            w[n] = 1.0
        else:
            w[n] = 0.5 * (1.0 + math.cos(2.0 * math.pi / shape * (u - 1.0 + shape / 2.0)))
    return w


def centroid_double_loop(powers: np.ndarray) -> float:
    """Starting-height formula evaluated with explicit loops."""
    num = 0.0
    den = 0.0
    k_count, l_count = powers.shape
    for k in range(k_count):
        row = 0.0
        for l in range(l_count):
            row += powers[k, l]
        num += k * row
        den += row
    return num / den


def loss_nested_loops(xs, ys, half_span, powers, alpha, beta, r, eps) -> float:
    """Objective evaluated exactly as written, term by term.

    Same epsilon-smoothed segment-length form as the library (the
    smoothing is part of the documented objective, not an
    implementation detail)."""
    m_count = len(ys)
    k_count, l_count = powers.shape
    l_len = 0.0
    for m in range(m_count - 1):
        dy = ys[m + 1] - ys[m]
        l_len += (dy * dy + eps * eps) ** (beta / 2.0)
    l_ridge = 0.0
    for m in range(m_count):
        inner = 0.0
        for k in range(k_count):
            col_sum = 0.0
            lo = min(max(int(round(xs[m])) - half_span, 0), l_count - 1)
            hi = min(max(int(round(xs[m])) + half_span, 0), l_count - 1)
            for l in range(lo, hi + 1):
                col_sum += powers[k, l]
            w = 1.0 / (1.0 + (k - ys[m]) ** 2 / (k_count * r * r))
            inner += w * col_sum
        l_ridge += inner * inner
    return alpha * l_len - l_ridge / alpha


def fullscale_rel_std(series, span: float) -> float:
    """Fluctuation of a series relative to its channel's representable
    span (255 for an 8-bit channel, 255 for the a* axis [-128, 127]).

    This is the measure under which the luminosity-separation claim is
    testable: both channels are compared on their native scales, the
    way the curves would be plotted.  The coefficient of variation
    (std/mean) cannot separate them, because an illumination scaling s
    moves a* by exactly s^(1/3) and encoded R by roughly s^(1/2.2),
    pinning the CV ratio near 1.3 for any base color.
    """
    return float(np.std(np.asarray(series, dtype=np.float64)) / span)
