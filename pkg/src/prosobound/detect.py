"""Convert score curves into boundary predictions.

Peak picking: a frame is a predicted boundary when its value reaches the
threshold and no frame within nms_radius_s holds a strictly greater value;
among equal values within the radius the earliest frame wins, so plateaus
report their first frame and returned peaks are always spaced more than
nms_radius_s apart. Suppression ignores the threshold, which makes the
returned set shrink monotonically as the threshold rises.

Alignment: each predicted time maps to the nearest word end within
align_radius_s (ties break toward the earlier word); predictions farther
than that from every word end are dropped, and predictions landing on the
same word end merge keeping the higher peak value.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .corpus import Recording, Scope
from .errors import ConfigError, ParseError, ValidationError
from .report import write_text_atomic
from .scores import FrameScores, _GRID_EPS


@dataclass(frozen=True)
class DetectorConfig:
    """threshold defaults to 0.5, the midpoint of the unit score range;
    models trained with 0.5-peak intermediate labels are typically run at
    0.75 instead (midway between the two label peaks)."""

    threshold: float = 0.5
    nms_radius_s: float = 0.25
    align_radius_s: float = 0.1

    def __post_init__(self):
        if not 0 <= self.threshold <= 1:
            raise ConfigError(f"threshold must be in [0, 1], got {self.threshold}")
        if self.nms_radius_s <= 0 or self.align_radius_s <= 0:
            raise ConfigError("nms_radius_s and align_radius_s must be > 0")


@dataclass(frozen=True)
class BoundaryPrediction:
    """A surviving peak: frame-center time and the score value there."""

    time_s: float
    peak_value: float


@dataclass(frozen=True)
class WordPrediction:
    """A prediction aligned to a word end."""

    recording_id: str
    sentence_id: str
    word_index: int
    time_s: float
    peak_value: float

    @property
    def key(self) -> tuple[str, str, int]:
        return (self.recording_id, self.sentence_id, self.word_index)


def detect_peaks(
    scores: FrameScores, cfg: DetectorConfig = DetectorConfig()
) -> list[BoundaryPrediction]:
    """Thresholded peak picking with non-maximum suppression."""
    v = scores.values
    n = len(v)
    if n == 0:
        return []
    fp = scores.frame_period_s
    w = int(cfg.nms_radius_s / fp + _GRID_EPS)  # frames within the radius
    w = min(w, n)

    if w == 0:
        keep = v >= cfg.threshold
    else:
        pad = np.full(w, -np.inf)
        windows = sliding_window_view(np.concatenate([pad, v, pad]), 2 * w + 1)
        before_max = windows[:, :w].max(axis=1)
        after_max = windows[:, w + 1:].max(axis=1)
        keep = (v >= cfg.threshold) & (before_max < v) & (after_max <= v)

    centers = scores.frame_centers()
    return [BoundaryPrediction(float(centers[i]), float(v[i]))
            for i in np.flatnonzero(keep)]


def _word_ends(rec: Recording) -> tuple[list[float], list[tuple[str, int]]]:
    ends, refs = [], []
    for sent, i, word in rec.iter_words():
        ends.append(word.end_s)
        refs.append((sent.id, i))
    return ends, refs


def align_to_words(
    preds: list[BoundaryPrediction],
    rec: Recording,
    cfg: DetectorConfig = DetectorConfig(),
) -> tuple[list[WordPrediction], list[BoundaryPrediction]]:
    """Map time-domain predictions onto word ends.

    Returns (aligned, dropped); aligned holds at most one prediction per
    word end, in time order.
    """
    ends, refs = _word_ends(rec)
    best: dict[int, WordPrediction] = {}
    dropped = []
    for p in preds:
        j = bisect.bisect_left(ends, p.time_s)
        # Candidates: the word ends flanking the prediction. The right one
        # wins only when strictly closer, so midpoint ties keep the
        # earlier word.
        cand = None
        if j > 0:
            cand = j - 1
        if j < len(ends) and (cand is None
                              or abs(ends[j] - p.time_s) < abs(ends[cand] - p.time_s)):
            cand = j
        if cand is None or abs(ends[cand] - p.time_s) > cfg.align_radius_s:
            dropped.append(p)
            continue
        sid, wi = refs[cand]
        word_pred = WordPrediction(rec.id, sid, wi, ends[cand], p.peak_value)
        prev = best.get(cand)
        if prev is None or word_pred.peak_value > prev.peak_value:
            best[cand] = word_pred
    aligned = [best[k] for k in sorted(best)]
    return aligned, dropped


def filter_scope(
    preds: list[WordPrediction], rec: Recording, scope: Scope
) -> list[WordPrediction]:
    """scope=WITHIN_SENTENCE removes predictions on sentence-final words;
    scope=ALL is the identity."""
    if scope is Scope.ALL:
        return list(preds)
    final = {(s.id, len(s.words) - 1) for s in rec.sentences}
    out = []
    for p in preds:
        if p.recording_id != rec.id:
            raise ValidationError(
                f"prediction for recording '{p.recording_id}' filtered against "
                f"recording '{rec.id}'"
            )
        if (p.sentence_id, p.word_index) not in final:
            out.append(p)
    return out


def write_time_predictions(preds: list[BoundaryPrediction],
                           path) -> None:
    """Time-domain prediction file: ``time_s<TAB>peak_value``, sorted."""
    lines = [f"{p.time_s:.6f}\t{p.peak_value:.6f}"
             for p in sorted(preds, key=lambda p: p.time_s)]
    write_text_atomic(path, "\n".join(lines) + ("\n" if lines else ""))


def write_word_predictions(preds: list[WordPrediction], path) -> None:
    """Word-domain prediction file:
    ``recording_id<TAB>sentence_id<TAB>word_index<TAB>peak_value``."""
    lines = [f"{p.recording_id}\t{p.sentence_id}\t{p.word_index}\t"
             f"{p.peak_value:.6f}"
             for p in sorted(preds, key=lambda p: (p.recording_id, p.time_s))]
    write_text_atomic(path, "\n".join(lines) + ("\n" if lines else ""))


def read_word_predictions(path, recs) -> list[WordPrediction]:
    """Parse a word-domain prediction file, resolving each entry against the
    corpus (unknown words are an error)."""
    words = {}
    for rec in recs:
        for sent, i, w in rec.iter_words():
            words[(rec.id, sent.id, i)] = w
    out = []
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    for ln, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 4:
            raise ParseError(f"{path}: line {ln}: expected 4 tab-separated "
                             f"fields, got {len(parts)}")
        rec_id, sent_id, idx_str, peak_str = parts
        try:
            idx = int(idx_str)
            peak = float(peak_str)
        except ValueError:
            raise ParseError(f"{path}: line {ln}: bad word index or peak "
                             f"value") from None
        word = words.get((rec_id, sent_id, idx))
        if word is None:
            raise ValidationError(
                f"{path}: line {ln}: unknown word (recording '{rec_id}', "
                f"sentence '{sent_id}', index {idx})"
            )
        out.append(WordPrediction(rec_id, sent_id, idx, word.end_s, peak))
    return out


__all__ = [
    "DetectorConfig", "BoundaryPrediction", "WordPrediction",
    "detect_peaks", "align_to_words", "filter_scope",
    "write_time_predictions", "write_word_predictions",
    "read_word_predictions",
]
