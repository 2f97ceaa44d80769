"""Flat key = value configuration files.

Keys are namespaced by module (stft.window_length, fit.alpha,
roi.normalize_by_pixel_count, synth.scenario, ...), '#' starts a
comment, values are parsed by the target field's type.  CLI flags
override file values.
"""

from __future__ import annotations

from dataclasses import dataclass, fields
from pathlib import Path

from .errors import ConfigError, InputMissing
from .fitting import FitConfig
from .spectrogram import StftConfig

_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off"}


def parse_config_text(text: str, source: str = "<config>") -> dict[str, str]:
    """Parse the flat format into a raw {key: value} dict."""
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {raw!r}")
        key, value = line.split("=", 1)
        key = key.strip()
        value = value.strip()
        if not key or not value:
            raise ConfigError(f"{source}:{lineno}: empty key or value")
        if key in out:
            raise ConfigError(f"{source}:{lineno}: duplicate key {key!r}")
        out[key] = value
    return out


def read_config_file(path: str | Path) -> dict[str, str]:
    path = Path(path)
    if not path.exists():
        raise InputMissing(f"config file not found: {path}")
    return parse_config_text(path.read_text(), source=str(path))


def _coerce(value: str, target_type, key: str):
    if target_type is bool:
        low = value.lower()
        if low in _TRUE:
            return True
        if low in _FALSE:
            return False
        raise ConfigError(f"{key}: expected a boolean, got {value!r}")
    try:
        if target_type is int:
            return int(value)
        if target_type is float:
            return float(value)
    except ValueError as e:
        raise ConfigError(f"{key}: {e}") from e
    return value


def _build_section(cls, section: str, raw: dict[str, str]):
    """Instantiate a config dataclass from its namespaced keys."""
    by_name = {f.name: f for f in fields(cls)}
    kwargs = {}
    for key, value in raw.items():
        if not key.startswith(section + "."):
            continue
        name = key[len(section) + 1 :]
        if name not in by_name:
            raise ConfigError(f"unknown key {key!r}")
        ftype = by_name[name].type
        if ftype in ("int", int):
            kwargs[name] = _coerce(value, int, key)
        elif ftype in ("float", float):
            kwargs[name] = _coerce(value, float, key)
        elif ftype in ("bool", bool):
            kwargs[name] = _coerce(value, bool, key)
        elif name == "vertex_count":  # int | None
            kwargs[name] = None if value.lower() == "auto" else _coerce(value, int, key)
        else:
            kwargs[name] = value
    return cls(**kwargs)


@dataclass(frozen=True)
class RoiConfig:
    cells_path: str = ""
    normalize_by_pixel_count: bool = True


@dataclass(frozen=True)
class PipelineConfig:
    """Everything a CLI run needs, merged from file and flags."""

    stft: StftConfig
    fit: FitConfig
    roi: RoiConfig
    raw: dict[str, str]

    @classmethod
    def from_raw(cls, raw: dict[str, str]) -> "PipelineConfig":
        known_sections = ("stft", "fit", "roi", "synth")
        for key in raw:
            if key.split(".", 1)[0] not in known_sections:
                raise ConfigError(f"unknown key {key!r}")
        return cls(
            stft=_build_section(StftConfig, "stft", raw),
            fit=_build_section(FitConfig, "fit", raw),
            roi=_build_section(RoiConfig, "roi", raw),
            raw=dict(raw),
        )

    @classmethod
    def load(cls, path: str | Path | None) -> "PipelineConfig":
        return cls.from_raw(read_config_file(path) if path else {})

    def echo(self) -> dict[str, str]:
        """The effective raw keys, for run reports."""
        return dict(self.raw)
