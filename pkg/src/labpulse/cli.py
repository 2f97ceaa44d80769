"""Command-line pipeline driver.

Verbs: extract (frames + landmarks -> heart-rate CSV), evaluate (curve
vs reference -> MAE report), synth (write synthetic fixture inputs),
report (summarize stored evaluation results).

Failures print one machine-readable JSON line on stderr, e.g.
{"error": "input-missing", "message": "..."}; exit codes are 0 on
success, 2 for input/config errors and 3 for numeric failures (empty
spectrogram).  RPPG_LOG_LEVEL (error|warn|info|debug) controls log
verbosity.
"""

from __future__ import annotations

import dataclasses
import json
import logging
import os
import sys
import time
from functools import wraps
from pathlib import Path

import click
import numpy as np

from . import fitting, io, roi, spectrogram, synthetic
from .config import PipelineConfig
from .errors import ConfigError, InputMissing, PipelineError
from .evaluation import align, mae, reference_hr
from .io import read_reference

log = logging.getLogger(__name__)

_LOG_LEVELS = {"error": logging.ERROR, "warn": logging.WARNING, "info": logging.INFO, "debug": logging.DEBUG}


def _setup_logging() -> None:
    level = os.environ.get("RPPG_LOG_LEVEL", "warn").lower()
    if level not in _LOG_LEVELS:
        raise ConfigError(f"RPPG_LOG_LEVEL must be one of {sorted(_LOG_LEVELS)}, got {level!r}")
    logging.basicConfig(level=_LOG_LEVELS[level], format="%(levelname)s %(name)s: %(message)s")


def _pipeline_errors(fn):
    """Map pipeline exceptions to the structured error line + exit code."""

    @wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            _setup_logging()
            return fn(*args, **kwargs)
        except PipelineError as e:
            print(json.dumps({"error": e.code, "message": str(e)}), file=sys.stderr)
            sys.exit(e.exit_code)
        except FileNotFoundError as e:
            print(json.dumps({"error": "input-missing", "message": str(e)}), file=sys.stderr)
            sys.exit(2)

    return wrapper


class _WarningCollector(logging.Handler):
    def __init__(self):
        super().__init__(level=logging.WARNING)
        self.messages: list[str] = []

    def emit(self, record):
        self.messages.append(record.getMessage())


@dataclasses.dataclass
class RunReport:
    """Evaluation outcome: one MAE per experiment plus run metadata."""

    experiments: list[tuple[str, float]]
    runtime_seconds: float
    config_echo: dict[str, str]
    warnings: list[str]

    @property
    def average_mae(self) -> float:
        return float(np.mean([m for _, m in self.experiments]))

    def to_json(self) -> str:
        return json.dumps(
            {
                "experiments": [{"experiment": n, "mae_bpm": m} for n, m in self.experiments],
                "average_mae_bpm": self.average_mae,
                "runtime_seconds": self.runtime_seconds,
                "config": self.config_echo,
                "warnings": self.warnings,
            },
            indent=2,
        )


@click.group()
def cli():
    """Camera heart-rate extraction pipeline."""


@cli.command()
@click.option("--config", "config_path", type=click.Path(), default=None, help="Flat key=value config file.")
@click.option("--frames", "frames_path", type=click.Path(), required=True, help="PNG directory or raw RPRF stream.")
@click.option("--landmarks", "landmarks_path", type=click.Path(), required=True, help="Landmark JSONL file.")
@click.option("--out", "out_dir", type=click.Path(), required=True, help="Output directory.")
@click.option("--dump-spectrogram", is_flag=True, help="Also write the processed spectrogram (RPSG binary).")
@click.option("--dump-weights", is_flag=True, help="Also write the fitted kernel weight map (CSV).")
@_pipeline_errors
def extract(config_path, frames_path, landmarks_path, out_dir, dump_spectrogram, dump_weights):
    """Extract the heart-rate curve from frames and landmarks."""
    config = PipelineConfig.load(config_path)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    landmarks = io.read_landmarks(landmarks_path)
    n_frames = io.count_frames(frames_path)
    if n_frames != len(landmarks):
        from .errors import LengthMismatch

        raise LengthMismatch(f"{n_frames} frames but {len(landmarks)} landmark records")

    cells = roi.load_cells(config.roi.cells_path) if config.roi.cells_path else roi.default_cells()

    frames_path = Path(frames_path)
    rate = config.stft.frame_rate
    if frames_path.is_file():
        stream_fps = io.raw_stream_fps(frames_path)
        if stream_fps > 0 and abs(stream_fps - rate) > 1e-6:
            raise ConfigError(
                f"raw stream fps {stream_fps} does not match stft.frame_rate {rate}"
            )

    from .color import convert_frame

    lab_frames = (convert_frame(f) for f in io.iter_frames(frames_path))
    series = roi.build_series(
        lab_frames,
        landmarks,
        cells,
        frame_rate=rate,
        normalize_by_pixel_count=config.roi.normalize_by_pixel_count,
    )
    combined = roi.combine_series(series)

    spec = spectrogram.preprocess(
        roi.CellSignalSeries(cell_id=-1, samples=combined, frame_rate=rate), config.stft
    )
    poly, trace = fitting.fit_with_trace(spec, config.fit)
    curve = fitting.sample_heart_rate(poly, spec)
    io.write_curve(curve, out / "curve.csv")
    log.info("fit stabilized=%s after %d iterations", trace.converged, trace.iterations)

    if dump_spectrogram:
        spectrogram.write_spectrogram(spec, out / "spectrogram.rpsg")
    if dump_weights:
        weights = fitting.kernel_weights(poly, spec, config.fit)
        np.savetxt(out / "weights.csv", weights, delimiter=",")
    click.echo(f"wrote {out / 'curve.csv'} ({len(curve.times)} samples)")


@cli.command()
@click.option("--config", "config_path", type=click.Path(), default=None)
@click.option("--curve", "curve_path", type=click.Path(), default=None, help="Extracted heart-rate CSV.")
@click.option("--reference", "reference_path", type=click.Path(), default=None, help="Two-column reference recording.")
@click.option("--pairs", "pairs_path", type=click.Path(), default=None, help="Batch manifest: experiment,curve_csv,reference_file per line.")
@click.option("--out", "out_dir", type=click.Path(), required=True)
@_pipeline_errors
def evaluate(config_path, curve_path, reference_path, pairs_path, out_dir):
    """Score extracted curves against reference recordings (MAE)."""
    config = PipelineConfig.load(config_path)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    started = time.perf_counter()

    collector = _WarningCollector()
    logging.getLogger().addHandler(collector)
    try:
        if pairs_path:
            jobs = _read_pairs_manifest(pairs_path)
        elif curve_path and reference_path:
            jobs = [("experiment", curve_path, reference_path)]
        else:
            raise ConfigError("need either --pairs or both --curve and --reference")

        experiments = []
        for name, cpath, rpath in jobs:
            curve = io.read_curve(cpath)
            ref_curve = _load_reference_curve(rpath, config)
            value = mae(align(curve, ref_curve))
            experiments.append((name, value))
            click.echo(f"{name}: MAE {value:.2f} BPM")
    finally:
        logging.getLogger().removeHandler(collector)

    report = RunReport(
        experiments=experiments,
        runtime_seconds=time.perf_counter() - started,
        config_echo=config.echo(),
        warnings=collector.messages,
    )
    with open(out / "report.csv", "w", newline="\n") as fh:
        fh.write("experiment,mae_bpm\n")
        for name, value in experiments:
            fh.write(f"{name},{value!r}\n")
    (out / "run_report.json").write_text(report.to_json())
    click.echo(f"average MAE: {report.average_mae:.2f} BPM over {len(experiments)} experiment(s)")


def _load_reference_curve(path, config: PipelineConfig):
    """A reference is either a raw two-column recording (run through the
    sliding-FFT argmax) or an already-computed BPM curve, told apart by
    the curve CSV header."""
    p = Path(path)
    if not p.exists():
        raise InputMissing(f"reference file not found: {p}")
    with open(p) as fh:
        first = fh.readline().strip()
    if first == "time_seconds,bpm":
        return io.read_curve(p)
    return reference_hr(read_reference(p), config.stft)


def _read_pairs_manifest(path) -> list[tuple[str, str, str]]:
    path = Path(path)
    if not path.exists():
        raise InputMissing(f"pairs manifest not found: {path}")
    base = path.parent
    jobs = []
    for lineno, line in enumerate(path.read_text().splitlines(), start=1):
        if not line.strip() or line.startswith("#"):
            continue
        parts = [p.strip() for p in line.split(",")]
        if len(parts) != 3:
            from .errors import ParseError

            raise ParseError(f"{path}:{lineno}: expected 'experiment,curve_csv,reference_file'")
        jobs.append((parts[0], str(base / parts[1]), str(base / parts[2])))
    if not jobs:
        from .errors import ParseError

        raise ParseError(f"{path}: empty manifest")
    return jobs


_SCENARIOS = {
    "const72": {"kind": "constant", "bpm": 72.0},
    "ramp": {"kind": "ramp", "bpm_start": 60.0, "bpm_end": 100.0},
    "spikes": {"kind": "constant", "bpm": 72.0, "spike_rate": 6.0, "spike_amplitude": 8.0},
}


@cli.command()
@click.option("--config", "config_path", type=click.Path(), default=None)
@click.option("--scenario", type=str, default=None, help="Named scenario: const72, ramp, spikes.")
@click.option("--out", "out_dir", type=click.Path(), required=True)
@click.option("--seed", type=int, default=0)
@click.option("--frame-format", type=click.Choice(["png", "raw"]), default="png")
@_pipeline_errors
def synth(config_path, scenario, out_dir, seed, frame_format):
    """Write a synthetic fixture: frames, landmarks, signal, truth curve."""
    config = PipelineConfig.load(config_path)
    raw = config.raw
    name = scenario or raw.get("synth.scenario", "const72")
    if name not in _SCENARIOS:
        raise ConfigError(f"unknown scenario {name!r}; pick one of {sorted(_SCENARIOS)}")
    params = dict(_SCENARIOS[name])
    duration = float(raw.get("synth.duration", 60.0))
    rate = config.stft.frame_rate

    if params["kind"] == "ramp":
        traj = synthetic.HrTrajectory.ramp(
            float(raw.get("synth.bpm_start", params["bpm_start"])),
            float(raw.get("synth.bpm_end", params["bpm_end"])),
            duration,
        )
    else:
        traj = synthetic.HrTrajectory.constant(float(raw.get("synth.bpm", params["bpm"])), duration)
    traj.check_band(config.stft.band_low, config.stft.band_high)

    distortion = synthetic.DistortionSpec(
        additive_noise_sigma=float(raw.get("synth.noise_sigma", 0.0)),
        luminosity_ramp_amplitude=float(raw.get("synth.lum_ramp", 0.0)),
        motion_spike_rate=float(raw.get("synth.spike_rate", params.get("spike_rate", 0.0))),
        motion_spike_amplitude=float(raw.get("synth.spike_amplitude", params.get("spike_amplitude", 0.0))),
    )

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    geometry = synthetic.GeometrySpec()
    frames, landmarks = synthetic.generate_frames(traj, distortion, geometry, rate, duration, seed)
    if frame_format == "png":
        io.write_png_dir(frames, out / "frames")
    else:
        io.write_raw_stream(frames, rate, out / "frames.rprf")
    io.write_landmarks(landmarks, out / "landmarks.jsonl")

    clean = synthetic.generate_signal(traj, rate, duration, synthetic.DistortionSpec(), seed)
    with open(out / "signal.csv", "w", newline="\n") as fh:
        fh.write("time_seconds,value\n")
        for i, v in enumerate(clean.samples):
            fh.write(f"{i / rate!r},{float(v)!r}\n")

    times = np.arange(len(clean.samples)) / rate
    truth = synthetic.HrTrajectory.bpm_at(traj, times)
    with open(out / "truth.csv", "w", newline="\n") as fh:
        fh.write("time_seconds,bpm\n")
        for t, b in zip(times, truth):
            fh.write(f"{float(t)!r},{float(b)!r}\n")

    cells_json = [
        {"cell_id": c.cell_id, "name": c.name, "landmarks": list(c.vertex_landmark_indices)}
        for c in geometry.cells
    ]
    (out / "cells.json").write_text(json.dumps(cells_json, indent=2) + "\n")
    click.echo(f"wrote scenario {name!r} to {out}")


@cli.command()
@click.option("--results", "results_path", type=click.Path(), required=True, help="A report.csv or a directory of them.")
@_pipeline_errors
def report(results_path):
    """Summarize stored evaluation results (arithmetic mean of MAEs)."""
    path = Path(results_path)
    if not path.exists():
        raise InputMissing(f"results not found: {path}")
    files = sorted(path.rglob("report.csv")) if path.is_dir() else [path]
    if not files:
        raise InputMissing(f"no report.csv under {path}")
    rows = []
    for f in files:
        lines = f.read_text().splitlines()
        if not lines or lines[0] != "experiment,mae_bpm":
            from .errors import ParseError

            raise ParseError(f"{f}: expected an 'experiment,mae_bpm' header")
        for line in lines[1:]:
            if line.strip():
                name, value = line.split(",", 1)
                rows.append((name, float(value)))
    for name, value in rows:
        click.echo(f"{name}: {value:.2f} BPM")
    average = float(np.mean([v for _, v in rows]))
    click.echo(f"average MAE: {average:.2f} BPM over {len(rows)} experiment(s)")


def main():
    cli()


if __name__ == "__main__":
    main()
