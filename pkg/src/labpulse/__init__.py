"""Camera-based heart-rate extraction.

The pipeline: sRGB frames are converted to CIELAB, face-cell polygons
are rasterized from tracked landmarks and reduced to one a* signal,
a sliding Tukey-windowed FFT turns that signal into a band-limited
spectrogram, and a polyline fitted by gradient descent over the
spectrogram becomes the heart-rate curve.  Curves are scored against
contact reference recordings by mean absolute error.
"""

from .color import LabFrame, RgbFrame, convert_frame, srgb_to_lab
from .errors import PipelineError
from .evaluation import HeartRateCurve, ReferenceRecording, align, mae, reference_hr
from .fitting import FitConfig, Polyline, fit, grad_loss, init_polyline, loss, sample_heart_rate
from .roi import CellSignalSeries, CellSpec, LandmarkFrame, aggregate_cell, build_series, rasterize_cell
from .spectrogram import (
    Spectrogram,
    StftConfig,
    compute_spectrogram,
    normalize_columns,
    threshold_noise,
    tukey_window,
)

__version__ = "0.1.0"

__all__ = [
    "CellSignalSeries",
    "CellSpec",
    "FitConfig",
    "HeartRateCurve",
    "LabFrame",
    "LandmarkFrame",
    "PipelineError",
    "Polyline",
    "ReferenceRecording",
    "RgbFrame",
    "Spectrogram",
    "StftConfig",
    "aggregate_cell",
    "align",
    "build_series",
    "compute_spectrogram",
    "convert_frame",
    "fit",
    "grad_loss",
    "init_polyline",
    "loss",
    "mae",
    "normalize_columns",
    "rasterize_cell",
    "reference_hr",
    "sample_heart_rate",
    "srgb_to_lab",
    "threshold_noise",
    "tukey_window",
    "__version__",
]
