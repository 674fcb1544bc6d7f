"""Per-frame boundary score vectors and the operations that produce them.

All scores live on a fixed frame grid: frame i spans
[i * frame_period_s, (i + 1) * frame_period_s) and has its timestamp at the
frame center, (i + 0.5) * frame_period_s. A signal of duration d has
ceil(d / frame_period_s) frames; a final partial frame counts as a full
frame covering the remainder.

Score file format (plain text):

    #frame_period_s 0.020000
    0.000000
    0.731250
    ...

one score per line, fixed 6-decimal formatting on write.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ConfigError, ParseError, StitchError, ValidationError
from .report import write_text_atomic

DEFAULT_FRAME_PERIOD_S = 0.02

# Guards against float noise in duration/period quotients (e.g. 0.74/0.02
# evaluating to 37.000000000000007); keeps frame counts stable.
_GRID_EPS = 1e-9


def frame_count(duration_s: float, frame_period_s: float) -> int:
    """Number of frames covering [0, duration_s]."""
    if duration_s <= 0 or frame_period_s <= 0:
        raise ConfigError(
            f"duration_s and frame_period_s must be > 0, got "
            f"{duration_s}, {frame_period_s}"
        )
    return int(math.ceil(duration_s / frame_period_s - _GRID_EPS))


def frame_centers(n_frames: int, frame_period_s: float) -> np.ndarray:
    """Timestamps of frames 0..n_frames-1 (frame centers, seconds)."""
    return (np.arange(n_frames) + 0.5) * frame_period_s


@dataclass(frozen=True, eq=False)
class FrameScores:
    """A score vector on the frame grid plus provenance.

    values are finite floats; raw model outputs may fall outside [0, 1]
    (use clipped() before thresholded detection).
    """

    frame_period_s: float
    values: np.ndarray
    source: str = ""

    def __post_init__(self):
        if self.frame_period_s <= 0:
            raise ValidationError(
                f"frame_period_s must be > 0, got {self.frame_period_s}"
            )
        vals = np.asarray(self.values, dtype=np.float64)
        if vals.ndim != 1:
            raise ValidationError(f"scores must be 1-D, got shape {vals.shape}")
        if not np.all(np.isfinite(vals)):
            bad = int(np.flatnonzero(~np.isfinite(vals))[0])
            raise ValidationError(f"non-finite score at frame {bad}")
        object.__setattr__(self, "values", vals)

    def __len__(self) -> int:
        return len(self.values)

    @property
    def duration_s(self) -> float:
        return len(self.values) * self.frame_period_s

    def frame_centers(self) -> np.ndarray:
        return frame_centers(len(self.values), self.frame_period_s)

    def clipped(self) -> "FrameScores":
        """Copy with values clipped to [0, 1]."""
        return FrameScores(self.frame_period_s, np.clip(self.values, 0.0, 1.0),
                           self.source)


@dataclass(frozen=True)
class ChunkWindow:
    start_s: float
    end_s: float
    keep_start_s: float
    keep_end_s: float


@dataclass(frozen=True)
class ChunkPlan:
    """Overlapping windows over a signal, each owning the middle part of its
    span; the first and last windows extend their keep interval to the
    signal edges. Keep intervals tile [0, duration] with no gaps or
    overlaps."""

    chunk_len_s: float
    step_s: float
    windows: tuple[ChunkWindow, ...]

    @property
    def duration_s(self) -> float:
        return self.windows[-1].keep_end_s


def plan_chunks(
    duration_s: float,
    chunk_len_s: float = 30.0,
    step_s: float = 15.0,
) -> ChunkPlan:
    """Plan overlapped chunks covering [0, duration_s].

    Window k starts at k * step_s; the last window ends at duration_s.
    Adjacent keep intervals meet at the midpoint of the window overlap, so
    for chunk_len = 2 * step the cut falls 1/4 resp. 3/4 into each window.
    """
    if chunk_len_s <= 0 or step_s <= 0:
        raise ConfigError("chunk_len_s and step_s must be > 0")
    if step_s > chunk_len_s:
        raise ConfigError(
            f"step_s ({step_s}) must not exceed chunk_len_s ({chunk_len_s})"
        )
    if duration_s <= 0:
        raise ConfigError(f"duration_s must be > 0, got {duration_s}")

    starts = [0.0]
    while starts[-1] + chunk_len_s < duration_s:
        starts.append(len(starts) * step_s)

    # Keep cut between windows k-1 and k: midpoint of their overlap.
    cuts = [0.0]
    for s in starts[1:]:
        cuts.append(s + (chunk_len_s - step_s) / 2.0)
    cuts.append(duration_s)

    windows = []
    for k, s in enumerate(starts):
        end = duration_s if k == len(starts) - 1 else s + chunk_len_s
        windows.append(ChunkWindow(s, end, cuts[k], cuts[k + 1]))
    return ChunkPlan(chunk_len_s, step_s, tuple(windows))


def _window_frame_range(w: ChunkWindow, frame_period_s: float) -> tuple[int, int]:
    """Global frame index range [a, b) covered by a window. The window start
    must sit on the frame grid."""
    a = w.start_s / frame_period_s
    if abs(a - round(a)) > 1e-6:
        raise StitchError(
            f"window start {w.start_s} s is not aligned to the "
            f"{frame_period_s} s frame grid"
        )
    b = math.ceil(w.end_s / frame_period_s - _GRID_EPS)
    return int(round(a)), int(b)


def stitch(chunks: list[FrameScores], plan: ChunkPlan) -> FrameScores:
    """Reassemble per-chunk scores into one vector, each frame copied from
    the unique chunk whose keep interval contains the frame center."""
    if len(chunks) != len(plan.windows):
        raise StitchError(
            f"plan has {len(plan.windows)} windows but got {len(chunks)} chunks"
        )
    fp = chunks[0].frame_period_s
    for i, c in enumerate(chunks):
        if abs(c.frame_period_s - fp) > 1e-12:
            raise StitchError(
                f"chunk {i}: frame period {c.frame_period_s} differs from "
                f"chunk 0's {fp}"
            )

    n_total = frame_count(plan.duration_s, fp)
    out = np.empty(n_total, dtype=np.float64)

    for i, (c, w) in enumerate(zip(chunks, plan.windows)):
        a, b = _window_frame_range(w, fp)
        if len(c) != b - a:
            raise StitchError(
                f"chunk {i} covering [{w.start_s}, {w.end_s}] s: expected "
                f"{b - a} frames, got {len(c)}"
            )
        # First frame whose center falls inside the keep interval.
        ks = 0 if i == 0 else int(math.ceil(w.keep_start_s / fp - 0.5 - _GRID_EPS))
        ke = n_total if i == len(chunks) - 1 else int(
            math.ceil(w.keep_end_s / fp - 0.5 - _GRID_EPS))
        out[ks:ke] = c.values[ks - a:ke - a]

    return FrameScores(fp, out, source=f"stitched-{len(chunks)}-chunks")


def average_seeds(runs: list[FrameScores]) -> FrameScores:
    """Pointwise arithmetic mean of score vectors from repeated runs."""
    if not runs:
        raise ValidationError("average_seeds needs at least one run")
    fp = runs[0].frame_period_s
    n = len(runs[0])
    for i, r in enumerate(runs):
        if abs(r.frame_period_s - fp) > 1e-12:
            raise ValidationError(
                f"run {i}: frame period {r.frame_period_s} differs from run 0's {fp}"
            )
        if len(r) != n:
            raise ValidationError(f"run {i}: length {len(r)} != run 0's {n}")
    mean = np.mean(np.stack([r.values for r in runs]), axis=0)
    return FrameScores(fp, mean, source=f"average-of-{len(runs)}")


@dataclass(frozen=True)
class BaselineParams:
    """Pause-energy baseline scorer settings.

    A frame is silent when its RMS energy is both in the lowest
    silence_energy_quantile of the recording's frames and below
    silence_floor_ratio of the peak frame energy (the absolute floor keeps
    quiet-but-voiced stretches from counting as pauses). Silence runs of at
    least min_pause_s seconds emit a triangular bump at the run midpoint
    with peak min(1, run_duration / full_credit_pause_s); bumps combine by
    pointwise maximum. Values are tunable defaults, not corpus-derived.
    """

    silence_energy_quantile: float = 0.10
    min_pause_s: float = 0.08
    full_credit_pause_s: float = 0.4
    ramp_halfwidth_s: float = 0.2
    frame_period_s: float = DEFAULT_FRAME_PERIOD_S
    silence_floor_ratio: float = 0.01

    def __post_init__(self):
        if not 0 <= self.silence_energy_quantile <= 1:
            raise ConfigError("silence_energy_quantile must be in [0, 1]")
        for name in ("min_pause_s", "full_credit_pause_s", "ramp_halfwidth_s",
                     "frame_period_s"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name} must be > 0")


def frame_rms(samples: np.ndarray, sample_rate: int,
              frame_period_s: float) -> np.ndarray:
    """Per-frame RMS energy; the final partial frame uses what is left."""
    spf = int(round(frame_period_s * sample_rate))
    n = frame_count(len(samples) / sample_rate, frame_period_s)
    cumsq = np.concatenate([[0.0], np.cumsum(samples.astype(np.float64) ** 2)])
    lo = np.minimum(np.arange(n) * spf, len(samples))
    hi = np.minimum(lo + spf, len(samples))
    counts = np.maximum(hi - lo, 1)
    return np.sqrt((cumsq[hi] - cumsq[lo]) / counts)


def baseline_score(
    samples: np.ndarray,
    sample_rate: int,
    params: BaselineParams = BaselineParams(),
) -> FrameScores:
    """Acoustic pause baseline: long low-energy runs score as boundaries.

    Stands in for a trained model so the detection/evaluation pipeline can
    run end to end on raw audio alone.
    """
    samples = np.asarray(samples, dtype=np.float64)
    if samples.ndim == 2:
        samples = samples[:, 0]
    if samples.ndim != 1 or len(samples) == 0:
        raise ValidationError("audio must be a non-empty 1-D sample array")
    if sample_rate <= 0:
        raise ConfigError(f"sample rate must be > 0, got {sample_rate}")

    fp = params.frame_period_s
    energy = frame_rms(samples, sample_rate, fp)
    threshold = np.quantile(energy, params.silence_energy_quantile)
    silent = (energy <= threshold) & (energy
                                      <= params.silence_floor_ratio * energy.max())

    values = np.zeros(len(energy))
    centers = frame_centers(len(energy), fp)
    run_start = None
    for i, s in enumerate(np.append(silent, False)):
        if s and run_start is None:
            run_start = i
        elif not s and run_start is not None:
            dur = (i - run_start) * fp
            if dur >= params.min_pause_s - _GRID_EPS:
                # Bump centered on the frame nearest the run midpoint
                # (earlier frame on edge ties), so the sampled curve attains
                # the full peak value.
                mid = centers[(run_start + i - 1) // 2]
                peak = min(1.0, dur / params.full_credit_pause_s)
                bump = peak * (1.0 - np.abs(centers - mid) / params.ramp_halfwidth_s)
                np.maximum(values, np.clip(bump, 0.0, None), out=values)
            run_start = None

    return FrameScores(fp, values, source="baseline")


def read_wav(path: str | Path) -> tuple[np.ndarray, int]:
    """Load a PCM WAV file as float samples in [-1, 1]; multichannel input
    keeps the first channel."""
    from scipy.io import wavfile

    try:
        rate, data = wavfile.read(path)
    except (OSError, ValueError) as e:
        raise ParseError(f"{path}: cannot read WAV file: {e}") from e
    if data.ndim == 2:
        data = data[:, 0]
    if np.issubdtype(data.dtype, np.integer):
        data = data.astype(np.float64) / max(abs(np.iinfo(data.dtype).min), 1)
    else:
        data = data.astype(np.float64)
    return data, int(rate)


def write_scores(scores: FrameScores, path: str | Path) -> None:
    lines = [f"#frame_period_s {scores.frame_period_s:.6f}"]
    lines.extend(f"{v:.6f}" for v in scores.values)
    write_text_atomic(path, "\n".join(lines) + "\n")


def read_scores(path: str | Path,
                expect_period_s: float | None = None) -> FrameScores:
    """Parse a score file. The header must declare the frame period; when
    expect_period_s is given, a differing header is an error."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ParseError(f"{path}: {e.strerror or e}") from e

    lines = text.splitlines()
    if not lines or not lines[0].startswith("#frame_period_s"):
        raise ParseError(f"{path}: line 1: missing '#frame_period_s' header")
    parts = lines[0].split()
    try:
        fp = float(parts[1])
    except (IndexError, ValueError):
        raise ParseError(f"{path}: line 1: malformed frame period header") from None
    if fp <= 0:
        raise ParseError(f"{path}: line 1: frame period must be > 0, got {fp}")
    if expect_period_s is not None and abs(fp - expect_period_s) > 1e-9:
        raise ParseError(
            f"{path}: frame period {fp} does not match expected {expect_period_s}"
        )

    values = np.empty(len(lines) - 1)
    for i, line in enumerate(lines[1:], start=2):
        try:
            values[i - 2] = float(line)
        except ValueError:
            raise ParseError(f"{path}: line {i}: non-numeric score "
                             f"'{line.strip()}'") from None
    try:
        return FrameScores(fp, values, source=path.name)
    except ValidationError as e:
        raise ParseError(f"{path}: {e}") from e


__all__ = [
    "DEFAULT_FRAME_PERIOD_S", "frame_count", "frame_centers", "FrameScores",
    "ChunkWindow", "ChunkPlan", "plan_chunks", "stitch", "average_seeds",
    "BaselineParams", "frame_rms", "baseline_score", "read_wav",
    "write_scores", "read_scores",
]
