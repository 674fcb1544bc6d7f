"""Fuzzy per-frame reference label curves.

Each boundary contributes a triangular ramp: peak value at the boundary
time, falling linearly to zero over ramp_halfwidth_s on both sides.
Prosodic boundaries peak at 1.0; intermediate boundaries, when included,
peak at 0.5. Where ramps overlap, the curve takes the pointwise maximum,
so values stay in [0, 1] and a peak always reads as boundary strength.
Ramps are clipped at the signal edges.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .corpus import Boundary, BoundaryKind, Recording
from .errors import ConfigError, ValidationError
from .scores import DEFAULT_FRAME_PERIOD_S, FrameScores, frame_centers, frame_count


@dataclass(frozen=True)
class LabelConfig:
    frame_period_s: float = DEFAULT_FRAME_PERIOD_S
    ramp_halfwidth_s: float = 0.2
    prosodic_peak: float = 1.0
    intermediate_peak: float = 0.5
    mode: BoundaryKind = BoundaryKind.PROSODIC_ONLY

    def __post_init__(self):
        if self.frame_period_s <= 0:
            raise ConfigError("frame_period_s must be > 0")
        if self.ramp_halfwidth_s <= 0:
            raise ConfigError("ramp_halfwidth_s must be > 0")
        if not 0 < self.intermediate_peak <= self.prosodic_peak <= 1:
            raise ConfigError(
                "need 0 < intermediate_peak <= prosodic_peak <= 1, got "
                f"{self.intermediate_peak}, {self.prosodic_peak}"
            )


@dataclass(frozen=True, eq=False)
class LabelCurve:
    """Reference label values, one per frame, in [0, 1]."""

    frame_period_s: float
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values",
                           np.asarray(self.values, dtype=np.float64))

    def __len__(self) -> int:
        return len(self.values)

    def to_scores(self, source: str = "fuzzy-labels") -> FrameScores:
        """Label curves and model outputs share the score file format."""
        return FrameScores(self.frame_period_s, self.values, source=source)


def ramp_value(t, center: float, peak: float, halfwidth_s: float):
    """Triangular ramp evaluated at time(s) t."""
    return np.maximum(0.0, peak * (1.0 - np.abs(np.asarray(t) - center) / halfwidth_s))


def make_label_curve(rec: Recording, cfg: LabelConfig = LabelConfig()) -> LabelCurve:
    """Build the fuzzy reference curve for a recording.

    mode=PROSODIC_ONLY ignores intermediate boundaries entirely;
    mode=PROSODIC_AND_INTERMEDIATE adds them with the smaller peak.
    """
    n = frame_count(rec.duration_s, cfg.frame_period_s)
    centers = frame_centers(n, cfg.frame_period_s)
    values = np.zeros(n)

    for _sent, _i, word in rec.iter_words():
        label = word.boundary_after
        if label is Boundary.PROSODIC:
            peak = cfg.prosodic_peak
        elif (label is Boundary.INTERMEDIATE
              and cfg.mode is BoundaryKind.PROSODIC_AND_INTERMEDIATE):
            peak = cfg.intermediate_peak
        else:
            continue
        t0 = word.end_s
        if not 0 <= t0 <= rec.duration_s:
            raise ValidationError(
                f"recording '{rec.id}': boundary at {t0} s outside "
                f"[0, {rec.duration_s}]"
            )
        lo = np.searchsorted(centers, t0 - cfg.ramp_halfwidth_s)
        hi = np.searchsorted(centers, t0 + cfg.ramp_halfwidth_s, side="right")
        np.maximum(
            values[lo:hi],
            ramp_value(centers[lo:hi], t0, peak, cfg.ramp_halfwidth_s),
            out=values[lo:hi],
        )

    return LabelCurve(cfg.frame_period_s, values)


__all__ = ["LabelConfig", "LabelCurve", "ramp_value", "make_label_curve"]
