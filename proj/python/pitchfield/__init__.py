"""Pitch-field analysis of bass stems: salient partials, pitch tracks, modal poles and beat maps."""

import json
from os import PathLike
from typing import Iterable

import numpy as np

from ._core import Error, JsonError, __version__
from . import _core

__all__ = [
    "Error",
    "JsonError",
    "__version__",
    "render",
    "salient_partials",
    "autocorrelation_track",
    "beat_map",
    "analyze",
    "default_config",
    "load_wav",
    "save_wav",
]


def render(spec: dict) -> tuple[np.ndarray, int]:
    """Render a synthesis document; returns (samples, sample_rate)."""
    return _core.render(json.dumps(spec))


def salient_partials(samples: np.ndarray, sample_rate: int, weighting: bool = True) -> dict:
    """Salient harmonics of the middle analysis frame."""
    return _core.salient_partials(samples, sample_rate, weighting)


def autocorrelation_track(
    samples: np.ndarray,
    sample_rate: int,
    frame_length: int = 4096,
    hop: int = 1024,
    min_hz: float = 25.0,
    max_hz: float = 1000.0,
    threshold: float = 0.3,
) -> tuple[np.ndarray, np.ndarray]:
    """Frame times and strongest autocorrelation pitch (NaN when unvoiced)."""
    return _core.autocorrelation_track(samples, sample_rate, frame_length, hop, min_hz, max_hz, threshold)


def beat_map(
    base_f0: float = 220.0,
    partials: int = 8,
    interval_min: float = 0.0,
    interval_max: float = 12.0,
    step: float = 0.05,
    rolloff: float = 1.0,
    seed: int = 1,
) -> dict:
    """Beat-frequency map over intervals in semitones, with labelled minima."""
    return _core.beat_map(base_f0, partials, interval_min, interval_max, step, rolloff, seed)


def analyze(paths: Iterable[str | PathLike], config: dict | None = None) -> dict:
    """Analyse WAV stems (files or directories); returns the report document."""
    return json.loads(_core.analyze([str(p) for p in paths], json.dumps(config or {})))


def default_config() -> dict:
    """Every analysis setting with its default value."""
    return json.loads(_core.default_config())


def load_wav(path: str | PathLike) -> tuple[np.ndarray, int]:
    """Read a mono or down-mixed WAV file; returns (samples, sample_rate)."""
    return _core.load_wav(str(path))


def save_wav(path: str | PathLike, samples: np.ndarray, sample_rate: int, format: str = "float32") -> None:
    """Write a WAV file as float32, pcm16 or pcm24."""
    _core.save_wav(str(path), samples, sample_rate, format)
