"""Ridge extraction: fit a polyline over the spectrogram by gradient
descent.

The polyline has M vertices with fixed, equidistant x positions over
[0, L] (window-index units) and free y positions in [0, K] (frequency-
bin units).  The fitted y minimize

    loss = alpha * L_len - L_ridge / alpha

where L_len penalizes vertical segment length, sum over segments of
|y_{m+1} - y_m|^beta (smoothed to (dy^2 + eps^2)^(beta/2) so the power
is differentiable at dy = 0 and for beta < 1), and L_ridge rewards
spectral mass under the vertices: for each vertex, the column sums of
the spectrogram over the vertex's +-p window are weighted by the
Cauchy-shaped kernel

    w(k) = 1 / (1 + (k - y_m)^2 / (K * r^2))

summed over bins, and squared.  Column windows clip to [0, L-1] at the
ends.  A plain ADAM loop drives the vertices; everything is
deterministic for a fixed config.

Starting y: the global power-weighted frequency centroid of the
spectrogram (all vertices equal).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, EmptySpectrogram
from .evaluation import HeartRateCurve
from .spectrogram import Spectrogram

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class FitConfig:
    """Tuning values for the polyline fit.

    vertex_count None picks one vertex per 10 seconds of signal
    (minimum 2).  The defaults were calibrated on the synthetic
    fixtures in the test suite; all are config-file overridable.
    """

    alpha: float = 30.0
    beta: float = 2.0
    r: float = 0.3
    vertex_count: int | None = None
    learning_rate: float = 1.0
    max_iterations: int = 300
    convergence_tol: float = 0.02
    smoothing_epsilon: float = 1e-3
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_epsilon: float = 1e-8

    def __post_init__(self):
        if self.alpha <= 0 or self.beta <= 0 or self.r <= 0:
            raise ConfigError("alpha, beta and r must be positive")
        if self.learning_rate <= 0:
            raise ConfigError("learning_rate must be positive")
        if self.vertex_count is not None and self.vertex_count < 2:
            raise ConfigError("vertex_count must be >= 2")
        if self.max_iterations < 1:
            raise ConfigError("max_iterations must be >= 1")


@dataclass
class Polyline:
    """Ridge polyline: fixed xs (window units), free ys (bin units)."""

    xs: np.ndarray
    ys: np.ndarray
    half_span: int

    def __post_init__(self):
        self.xs = np.asarray(self.xs, dtype=np.float64)
        self.ys = np.asarray(self.ys, dtype=np.float64)
        if self.xs.ndim != 1 or self.xs.shape != self.ys.shape:
            raise ValueError("xs and ys must be 1-d and equally long")
        if len(self.xs) >= 2 and not np.all(np.diff(self.xs) > 0):
            raise ValueError("xs must be strictly increasing")


@dataclass
class AdamState:
    """First/second moment accumulators for the vertex ys."""

    first_moment: np.ndarray
    second_moment: np.ndarray
    iteration: int = 0


@dataclass
class FitTrace:
    """Per-iteration diagnostics from fit_with_trace."""

    iterations: int = 0
    converged: bool = False
    losses: list[float] = field(default_factory=list)
    max_steps: list[float] = field(default_factory=list)


def _vertex_count(config: FitConfig, spec: Spectrogram) -> int:
    if config.vertex_count is not None:
        return config.vertex_count
    duration = float(spec.time_s[-1] - spec.time_s[0]) if spec.n_columns > 1 else 0.0
    return max(2, int(round(duration / 10.0)) + 1)


def init_polyline(spec: Spectrogram, config: FitConfig) -> Polyline:
    """Equidistant xs over [0, L]; all ys at the power-weighted centroid.

    The centroid is sum_k(k * sum_l P[k, l]) / sum_kl P[k, l] with k the
    band-relative bin index.  Raises EmptySpectrogram when the
    spectrogram is all zero.
    """
    total = spec.powers.sum()
    if total <= 0.0:
        raise EmptySpectrogram("spectrogram has no non-zero values")
    row_mass = spec.powers.sum(axis=1)
    y_start = float(np.arange(spec.n_bins) @ row_mass / total)
    m = _vertex_count(config, spec)
    xs = np.linspace(0.0, float(spec.n_columns), m)
    p = int(round((xs[1] - xs[0]) / 2.0)) if m >= 2 else 0
    return Polyline(xs=xs, ys=np.full(m, y_start), half_span=p)


def _window_sums(spec: Spectrogram, poly: Polyline) -> np.ndarray:
    """Per-vertex column sums A[k, m] = sum of P[k, l] over the vertex
    window [x_m - p, x_m + p], clipped to valid columns.  These do not
    depend on ys, so a fit computes them once."""
    last = spec.n_columns - 1
    a = np.empty((spec.n_bins, len(poly.xs)))
    for m, x in enumerate(poly.xs):
        lo = min(max(int(round(x)) - poly.half_span, 0), last)
        hi = min(max(int(round(x)) + poly.half_span, 0), last)
        a[:, m] = spec.powers[:, lo : hi + 1].sum(axis=1)
    return a


def _loss_terms(ys: np.ndarray, a: np.ndarray, config: FitConfig) -> tuple[float, float]:
    k_count = a.shape[0]
    dy = np.diff(ys)
    l_len = float(((dy * dy + config.smoothing_epsilon**2) ** (config.beta / 2.0)).sum())
    k = np.arange(k_count)[:, None]
    w = 1.0 / (1.0 + (k - ys[None, :]) ** 2 / (k_count * config.r * config.r))
    inner = (w * a).sum(axis=0)
    l_ridge = float((inner * inner).sum())
    return l_len, l_ridge


def loss(poly: Polyline, spec: Spectrogram, config: FitConfig) -> float:
    """The scalar objective for a polyline over a spectrogram."""
    a = _window_sums(spec, poly)
    l_len, l_ridge = _loss_terms(poly.ys, a, config)
    return config.alpha * l_len - l_ridge / config.alpha


def _grad_from_sums(ys: np.ndarray, a: np.ndarray, config: FitConfig) -> np.ndarray:
    k_count = a.shape[0]
    eps2 = config.smoothing_epsilon**2
    beta = config.beta

    dy = np.diff(ys)
    seg = beta * dy * (dy * dy + eps2) ** (beta / 2.0 - 1.0)
    g_len = np.zeros_like(ys)
    g_len[:-1] -= seg
    g_len[1:] += seg

    k = np.arange(k_count)[:, None]
    c = k_count * config.r * config.r
    diff = k - ys[None, :]
    w = 1.0 / (1.0 + diff * diff / c)
    inner = (w * a).sum(axis=0)
    dw = 2.0 * diff / c * w * w
    g_ridge = 2.0 * inner * (a * dw).sum(axis=0)

    return config.alpha * g_len - g_ridge / config.alpha


def grad_loss(poly: Polyline, spec: Spectrogram, config: FitConfig) -> np.ndarray:
    """Analytic partial derivatives of loss with respect to each y."""
    a = _window_sums(spec, poly)
    return _grad_from_sums(poly.ys, a, config)


def fit_with_trace(spec: Spectrogram, config: FitConfig) -> tuple[Polyline, FitTrace]:
    """ADAM descent from the centroid start until the largest vertex
    move in an iteration drops below convergence_tol (or the iteration
    budget runs out).  ys clamp to [0, K] after each step."""
    poly = init_polyline(spec, config)
    a = _window_sums(spec, poly)
    k_count = spec.n_bins
    state = AdamState(np.zeros_like(poly.ys), np.zeros_like(poly.ys))
    trace = FitTrace()
    ys = poly.ys
    for _ in range(config.max_iterations):
        g = _grad_from_sums(ys, a, config)
        state.iteration += 1
        state.first_moment = config.adam_beta1 * state.first_moment + (1 - config.adam_beta1) * g
        state.second_moment = config.adam_beta2 * state.second_moment + (1 - config.adam_beta2) * g * g
        m_hat = state.first_moment / (1 - config.adam_beta1**state.iteration)
        v_hat = state.second_moment / (1 - config.adam_beta2**state.iteration)
        step = config.learning_rate * m_hat / (np.sqrt(v_hat) + config.adam_epsilon)
        new_ys = np.clip(ys - step, 0.0, float(k_count))
        max_step = float(np.abs(new_ys - ys).max())
        ys = new_ys
        trace.iterations += 1
        trace.max_steps.append(max_step)
        l_len, l_ridge = _loss_terms(ys, a, config)
        trace.losses.append(config.alpha * l_len - l_ridge / config.alpha)
        if max_step < config.convergence_tol:
            trace.converged = True
            break
    if not trace.converged:
        log.info("fit hit max_iterations=%d without stabilizing", config.max_iterations)
    poly.ys = ys
    return poly, trace


def fit(spec: Spectrogram, config: FitConfig) -> Polyline:
    """Fit the ridge polyline (see fit_with_trace for diagnostics)."""
    poly, _ = fit_with_trace(spec, config)
    return poly


def sample_heart_rate(poly: Polyline, spec: Spectrogram) -> HeartRateCurve:
    """Evaluate the polyline at every column and map bins to BPM.

    Linear interpolation between vertices; fractional bins map through
    the uniform frequency axis.  BPM values clamp to the axis band so a
    clamped-out vertex (y slightly past the last bin) cannot escape it.
    """
    cols = np.arange(spec.n_columns, dtype=np.float64)
    y = np.interp(cols, poly.xs, poly.ys)
    bin_width = float(spec.freq_bpm[1] - spec.freq_bpm[0]) if spec.n_bins > 1 else 0.0
    bpm = spec.freq_bpm[0] + y * bin_width
    bpm = np.clip(bpm, spec.freq_bpm[0], spec.freq_bpm[-1])
    return HeartRateCurve(times=spec.time_s.copy(), bpm=bpm)


def kernel_weights(poly: Polyline, spec: Spectrogram, config: FitConfig) -> np.ndarray:
    """The (K, M) kernel weight map around the fitted vertices, for
    diagnostic dumps."""
    k = np.arange(spec.n_bins)[:, None]
    return 1.0 / (1.0 + (k - poly.ys[None, :]) ** 2 / (spec.n_bins * config.r * config.r))
