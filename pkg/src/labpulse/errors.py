"""Exception types shared across the pipeline.

Every error carries a short machine-readable ``code`` so the CLI can emit
one structured error line and map the failure to an exit code.
"""


class PipelineError(Exception):
    """Base class for all pipeline failures."""

    code = "pipeline-error"
    exit_code = 2


class ConfigError(PipelineError):
    code = "config-invalid"


class ParseError(PipelineError):
    code = "parse-error"


class InputMissing(PipelineError):
    code = "input-missing"


class DegenerateCell(PipelineError):
    """A cell polygon covers zero pixels for a frame."""

    code = "degenerate-cell"


class EmptyCell(PipelineError):
    """Aggregation was asked to run over an empty pixel set."""

    code = "empty-cell"


class LengthMismatch(PipelineError):
    """Frame and landmark sequences have different lengths."""

    code = "length-mismatch"


class SignalTooShort(PipelineError):
    """The signal is shorter than one analysis window."""

    code = "signal-too-short"


class EmptySpectrogram(PipelineError):
    """All spectrogram values are zero; there is no ridge to fit."""

    code = "empty-spectrogram"
    exit_code = 3


class NoOverlap(PipelineError):
    """Two curves share no common time span."""

    code = "no-overlap"


class EmptyPairing(PipelineError):
    """MAE was requested over zero aligned samples."""

    code = "empty-pairing"
