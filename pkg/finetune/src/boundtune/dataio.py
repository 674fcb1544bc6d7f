"""File formats and frame-grid arithmetic shared with the detection pipeline.

This package talks to the detection toolkit purely through its file
formats: it reads the JSON annotation format and emits the plain-text
score format (``#frame_period_s`` header, one 6-decimal value per line).
The fuzzy target curves and the overlapped-chunk plan are re-derived here
with the same conventions: frames of 20 ms with centered timestamps,
triangular ramps combined by pointwise maximum, and middle-keep chunk
stitching.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

SAMPLE_RATE = 16000
FRAME_STRIDE = 320  # samples per output frame at 16 kHz -> 20 ms
FRAME_PERIOD_S = FRAME_STRIDE / SAMPLE_RATE

_EPS = 1e-9


class DataError(Exception):
    """Bad or inconsistent input data."""


class ExportError(Exception):
    """Model output does not fit the expected frame layout."""


def frame_count(duration_s: float, frame_period_s: float = FRAME_PERIOD_S) -> int:
    return int(math.ceil(duration_s / frame_period_s - _EPS))


def frame_centers(n: int, frame_period_s: float = FRAME_PERIOD_S) -> np.ndarray:
    return (np.arange(n) + 0.5) * frame_period_s


@dataclass(frozen=True)
class WordRow:
    text: str
    start_s: float
    end_s: float
    boundary_after: str  # "none" | "intermediate" | "prosodic"


@dataclass(frozen=True)
class Annotation:
    recording_id: str
    speaker_id: str
    duration_s: float
    sentences: tuple[tuple[str, tuple[WordRow, ...]], ...]

    def words(self):
        for _, ws in self.sentences:
            yield from ws


def read_annotation(path: str | Path) -> Annotation:
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as e:
        raise DataError(f"{path}: {e}") from e
    try:
        sentences = tuple(
            (s["id"], tuple(WordRow(w["text"], float(w["start_s"]),
                                    float(w["end_s"]), w["boundary_after"])
                            for w in s["words"]))
            for s in doc["sentences"]
        )
        return Annotation(doc["recording_id"], doc["speaker_id"],
                          float(doc["duration_s"]), sentences)
    except (KeyError, TypeError, ValueError) as e:
        raise DataError(f"{path}: malformed annotation: {e}") from e


def load_corpus(corpus_dir: str | Path) -> list[Annotation]:
    files = sorted(Path(corpus_dir).glob("*.json"))
    if not files:
        raise DataError(f"{corpus_dir}: no annotation files found")
    return [read_annotation(f) for f in files]


def fuzzy_targets(ann: Annotation, mode: str = "prosodic",
                  ramp_halfwidth_s: float = 0.2,
                  frame_period_s: float = FRAME_PERIOD_S) -> np.ndarray:
    """Per-frame regression targets: ramps peaking 1.0 at prosodic
    boundaries (0.5 at intermediate ones when mode includes them)."""
    if mode not in ("prosodic", "prosodic+intermediate"):
        raise DataError(f"unknown label mode '{mode}'")
    n = frame_count(ann.duration_s, frame_period_s)
    centers = frame_centers(n, frame_period_s)
    values = np.zeros(n)
    for w in ann.words():
        if w.boundary_after == "prosodic":
            peak = 1.0
        elif w.boundary_after == "intermediate" and mode == "prosodic+intermediate":
            peak = 0.5
        else:
            continue
        ramp = peak * (1.0 - np.abs(centers - w.end_s) / ramp_halfwidth_s)
        np.maximum(values, np.clip(ramp, 0.0, None), out=values)
    return values


def load_wav(path: str | Path) -> tuple[np.ndarray, int]:
    from scipy.io import wavfile

    try:
        rate, data = wavfile.read(path)
    except (OSError, ValueError) as e:
        raise DataError(f"{path}: cannot read WAV: {e}") from e
    if data.ndim == 2:
        data = data[:, 0]
    if np.issubdtype(data.dtype, np.integer):
        data = data.astype(np.float32) / max(abs(np.iinfo(data.dtype).min), 1)
    else:
        data = data.astype(np.float32)
    return data, int(rate)


def plan_windows(duration_s: float, chunk_len_s: float = 30.0,
                 step_s: float = 15.0) -> list[tuple[float, float]]:
    """Window spans [start, end] covering [0, duration], step_s apart."""
    if not 0 < step_s <= chunk_len_s:
        raise DataError("need 0 < step_s <= chunk_len_s")
    starts = [0.0]
    while starts[-1] + chunk_len_s < duration_s:
        starts.append(len(starts) * step_s)
    return [(s, duration_s if i == len(starts) - 1 else s + chunk_len_s)
            for i, s in enumerate(starts)]


def window_frames(start_s: float, end_s: float,
                  frame_period_s: float = FRAME_PERIOD_S) -> tuple[int, int]:
    """Global frame range [a, b) covered by a window on the frame grid."""
    a = start_s / frame_period_s
    if abs(a - round(a)) > 1e-6:
        raise ExportError(f"window start {start_s} is off the frame grid")
    return int(round(a)), int(math.ceil(end_s / frame_period_s - _EPS))


def stitch_frames(chunks: list[np.ndarray],
                  windows: list[tuple[float, float]],
                  duration_s: float,
                  frame_period_s: float = FRAME_PERIOD_S) -> np.ndarray:
    """Middle-keep reassembly: each frame comes from the window whose keep
    interval (overlap midpoints; edges extended to the signal ends) holds
    the frame center."""
    n_total = frame_count(duration_s, frame_period_s)
    out = np.empty(n_total)
    cut_frames = [0]
    for (s0, e0), (s1, _)in zip(windows, windows[1:]):
        mid = (s1 + e0) / 2.0
        cut_frames.append(int(math.ceil(mid / frame_period_s - 0.5 - _EPS)))
    cut_frames.append(n_total)
    for chunk, (w, ks, ke) in zip(chunks,
                                  zip(windows, cut_frames, cut_frames[1:])):
        a, b = window_frames(*w, frame_period_s)
        if len(chunk) != b - a:
            raise ExportError(
                f"chunk for window {w}: got {len(chunk)} frames, expected {b - a}"
            )
        out[ks:ke] = chunk[ks - a:ke - a]
    return out


def write_scores(values: np.ndarray, path: str | Path,
                 frame_period_s: float = FRAME_PERIOD_S) -> None:
    values = np.asarray(values, dtype=np.float64)
    if not np.all(np.isfinite(values)):
        raise ExportError(f"{path}: refusing to write non-finite scores")
    lines = [f"#frame_period_s {frame_period_s:.6f}"]
    lines.extend(f"{v:.6f}" for v in values)
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_scores(path: str | Path) -> tuple[np.ndarray, float]:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines or not lines[0].startswith("#frame_period_s"):
        raise DataError(f"{path}: missing frame-period header")
    fp = float(lines[0].split()[1])
    return np.array([float(x) for x in lines[1:]]), fp
