"""Boundary-classification and segmentation metrics.

Word-level counting treats every in-scope word end as a candidate
position: a true positive is a word end carrying both a predicted and a
reference prosodic boundary. Reference intermediate boundaries count as
negatives; evaluation targets prosodic boundaries only.

Zero-denominator metrics surface as None ("n/a" in reports), never as a
silent 0. Aggregate rows are computed from summed counts, not averaged
percentages.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Collection, Iterable, Mapping, Sequence

from .corpus import Boundary, Recording, Scope
from .detect import DetectorConfig, WordPrediction, align_to_words, detect_peaks, filter_scope
from .errors import ConfigError, ValidationError
from .scores import FrameScores

WordKey = tuple[str, str, int]  # (recording_id, sentence_id, word_index)


@dataclass(frozen=True)
class DetectionCounts:
    tp: int = 0
    fp: int = 0
    fn: int = 0
    tn: int = 0

    def __add__(self, other: "DetectionCounts") -> "DetectionCounts":
        return DetectionCounts(self.tp + other.tp, self.fp + other.fp,
                               self.fn + other.fn, self.tn + other.tn)

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn


@dataclass(frozen=True)
class DetectionMetrics:
    """Fractions in [0, 1]; None marks an undefined (0/0) value."""

    precision: float | None
    recall: float | None
    accuracy: float | None
    f1: float | None


@dataclass(frozen=True)
class FpBreakdown:
    """False positives split by the reference label at the word end."""

    fp_intermediate: int = 0
    fp_nobreak: int = 0

    @property
    def fp(self) -> int:
        return self.fp_intermediate + self.fp_nobreak

    def __add__(self, other: "FpBreakdown") -> "FpBreakdown":
        return FpBreakdown(self.fp_intermediate + other.fp_intermediate,
                           self.fp_nobreak + other.fp_nobreak)


def compute_metrics(c: DetectionCounts) -> DetectionMetrics:
    precision = c.tp / (c.tp + c.fp) if c.tp + c.fp else None
    recall = c.tp / (c.tp + c.fn) if c.tp + c.fn else None
    accuracy = (c.tp + c.tn) / c.total if c.total else None
    if precision is None or recall is None or precision + recall == 0:
        f1 = None
    else:
        f1 = 2 * precision * recall / (precision + recall)
    return DetectionMetrics(precision, recall, accuracy, f1)


def _as_keys(preds: Iterable[WordPrediction | WordKey]) -> set[WordKey]:
    out = set()
    for p in preds:
        out.add(p.key if isinstance(p, WordPrediction) else (p[0], p[1], p[2]))
    return out


def _scoped_words(rec: Recording, scope: Scope):
    for sent in rec.sentences:
        last = len(sent.words) - 1
        for i, w in enumerate(sent.words):
            if scope is Scope.WITHIN_SENTENCE and i == last:
                continue
            yield (rec.id, sent.id, i), w


def count_word_level(
    preds: Collection[WordPrediction | WordKey],
    rec: Recording,
    scope: Scope = Scope.ALL,
) -> DetectionCounts:
    """Count tp/fp/fn/tn over all in-scope word ends of one recording."""
    predicted = _as_keys(preds)
    tp = fp = fn = tn = 0
    for key, word in _scoped_words(rec, scope):
        hit = key in predicted
        predicted.discard(key)
        if word.boundary_after is Boundary.PROSODIC:
            tp, fn = (tp + 1, fn) if hit else (tp, fn + 1)
        else:
            fp, tn = (fp + 1, tn) if hit else (fp, tn + 1)
    if predicted:
        bad = sorted(predicted)[0]
        raise ValidationError(
            f"prediction references no in-scope word: recording '{bad[0]}', "
            f"sentence '{bad[1]}', word {bad[2]}"
        )
    return DetectionCounts(tp, fp, fn, tn)


def count_corpus(
    preds: Collection[WordPrediction | WordKey],
    recs: Sequence[Recording],
    scope: Scope = Scope.ALL,
) -> DetectionCounts:
    """Sum word-level counts over a corpus."""
    by_rec: dict[str, set[WordKey]] = {r.id: set() for r in recs}
    for key in _as_keys(preds):
        if key[0] not in by_rec:
            raise ValidationError(f"prediction references unknown recording "
                                  f"'{key[0]}'")
        by_rec[key[0]].add(key)
    total = DetectionCounts()
    for rec in recs:
        total = total + count_word_level(by_rec[rec.id], rec, scope)
    return total


def fp_breakdown(
    preds: Collection[WordPrediction | WordKey],
    rec: Recording,
    scope: Scope = Scope.ALL,
) -> FpBreakdown:
    """Partition false positives by the reference label at the word end."""
    predicted = _as_keys(preds)
    inter = nobreak = 0
    for key, word in _scoped_words(rec, scope):
        if key in predicted and word.boundary_after is not Boundary.PROSODIC:
            if word.boundary_after is Boundary.INTERMEDIATE:
                inter += 1
            else:
                nobreak += 1
    return FpBreakdown(inter, nobreak)


@dataclass(frozen=True)
class Segmentation:
    """Ordered, non-overlapping (start_s, end_s) segments."""

    segments: tuple[tuple[float, float], ...]

    def __post_init__(self):
        prev_end = None
        for start, end in self.segments:
            if start >= end:
                raise ValidationError(f"segment [{start}, {end}] has no extent")
            if prev_end is not None and start < prev_end:
                raise ValidationError(
                    f"segment [{start}, {end}] overlaps previous end {prev_end}"
                )
            prev_end = end

    @property
    def total_s(self) -> float:
        return sum(e - s for s, e in self.segments)


def segmentation_from_boundaries(
    boundaries: Sequence[float], duration_s: float, start_s: float = 0.0
) -> Segmentation:
    """n boundaries inside (start_s, duration_s) produce n+1 tiling segments."""
    prev = None
    for b in boundaries:
        if not start_s < b < duration_s:
            raise ValidationError(
                f"boundary {b} outside the open span ({start_s}, {duration_s})"
            )
        if prev is not None and b <= prev:
            raise ValidationError(f"boundaries not strictly increasing at {b}")
        prev = b
    edges = [start_s, *boundaries, duration_s]
    return Segmentation(tuple(zip(edges, edges[1:])))


def max_overlap_sum(a: Segmentation, b: Segmentation) -> float:
    """sum over segments of a of the largest single overlap with b."""
    total = 0.0
    for s_start, s_end in a.segments:
        best = 0.0
        for r_start, r_end in b.segments:
            if r_start >= s_end:
                break
            best = max(best, min(s_end, r_end) - max(s_start, r_start))
        total += best
    return total


def purity_coverage(
    sys: Segmentation, ref: Segmentation
) -> tuple[float | None, float | None]:
    """Segment purity and coverage (durations in seconds).

    purity  = sum_k max_j |s_k n r_j| / sum_k |s_k|
    coverage = sum_j max_k |s_k n r_j| / sum_j |r_j|

    The two are duals: purity(S, R) == coverage(R, S). An empty segmentation
    makes the corresponding metric undefined (None).
    """
    purity = (max_overlap_sum(sys, ref) / sys.total_s) if sys.segments else None
    coverage = (max_overlap_sum(ref, sys) / ref.total_s) if ref.segments else None
    return purity, coverage


@dataclass(frozen=True)
class SweepRow:
    threshold: float
    counts: DetectionCounts
    metric: DetectionMetrics
    purity: float | None
    coverage: float | None
    fp_intermediate_fraction: float | None
    n_predictions: int


def reference_segmentation(rec: Recording) -> Segmentation:
    """Prosodic phrases implied by the reference prosodic boundaries,
    tiling the whole recording."""
    times = [w.end_s for _, _, w in rec.iter_words()
             if w.boundary_after is Boundary.PROSODIC and 0 < w.end_s < rec.duration_s]
    return segmentation_from_boundaries(times, rec.duration_s)


def sweep(
    scores_by_rec: Mapping[str, FrameScores],
    recs: Sequence[Recording],
    thresholds: Sequence[float],
    scope: Scope = Scope.ALL,
    cfg: DetectorConfig = DetectorConfig(),
) -> list[SweepRow]:
    """Re-run detect -> align -> filter -> count at each threshold.

    Purity/coverage compare the segmentation induced by the raw detected
    peak times against the reference prosodic segmentation (scope-
    independent, whole recordings); numerators and denominators are summed
    across recordings before dividing, like the counts.
    """
    prev = None
    for t in thresholds:
        if not 0 <= t <= 1:
            raise ConfigError(f"threshold {t} outside [0, 1]")
        if prev is not None and t < prev:
            raise ConfigError("thresholds must be sorted ascending")
        prev = t
    missing = [r.id for r in recs if r.id not in scores_by_rec]
    if missing:
        raise ValidationError(f"no scores for recording(s): {', '.join(missing)}")

    ref_segs = {r.id: reference_segmentation(r) for r in recs}
    rows = []
    for t in thresholds:
        det = replace(cfg, threshold=t)
        counts = DetectionCounts()
        breakdown = FpBreakdown()
        pur_num = pur_den = cov_num = cov_den = 0.0
        n_preds = 0
        for rec in recs:
            peaks = detect_peaks(scores_by_rec[rec.id], det)
            n_preds += len(peaks)
            aligned, _ = align_to_words(peaks, rec, det)
            in_scope = filter_scope(aligned, rec, scope)
            counts = counts + count_word_level(in_scope, rec, scope)
            breakdown = breakdown + fp_breakdown(in_scope, rec, scope)

            times = [p.time_s for p in peaks if 0 < p.time_s < rec.duration_s]
            sys_seg = segmentation_from_boundaries(times, rec.duration_s)
            ref_seg = ref_segs[rec.id]
            pur_num += max_overlap_sum(sys_seg, ref_seg)
            pur_den += sys_seg.total_s
            cov_num += max_overlap_sum(ref_seg, sys_seg)
            cov_den += ref_seg.total_s

        rows.append(SweepRow(
            threshold=t,
            counts=counts,
            metric=compute_metrics(counts),
            purity=pur_num / pur_den if pur_den else None,
            coverage=cov_num / cov_den if cov_den else None,
            fp_intermediate_fraction=(breakdown.fp_intermediate / breakdown.fp
                                      if breakdown.fp else None),
            n_predictions=n_preds,
        ))
    return rows


__all__ = [
    "WordKey", "DetectionCounts", "DetectionMetrics", "FpBreakdown",
    "compute_metrics", "count_word_level", "count_corpus", "fp_breakdown",
    "Segmentation", "segmentation_from_boundaries", "purity_coverage",
    "max_overlap_sum", "reference_segmentation", "SweepRow", "sweep",
]
