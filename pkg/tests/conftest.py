"""Shared random-data builders for the test suite.

All generators take an explicit numpy Generator so every test is
reproducible from its own seed.
"""

from __future__ import annotations

import numpy as np
import pytest

from prosobound.corpus import Boundary, Recording, Sentence, Word

LABEL_POOL = [Boundary.NONE, Boundary.NONE, Boundary.NONE,
              Boundary.INTERMEDIATE, Boundary.PROSODIC, Boundary.PROSODIC]


def random_recording(rng: np.random.Generator,
                     rec_id: str = "rec",
                     speaker_id: str = "spk",
                     n_sentences: int | None = None,
                     min_word_s: float = 0.1,
                     max_word_s: float = 0.5,
                     tail_s: float = 0.3) -> Recording:
    """A structurally valid recording with random timings and labels."""
    n_sentences = n_sentences or int(rng.integers(1, 5))
    cursor = float(rng.uniform(0, 0.3))
    sentences = []
    for si in range(n_sentences):
        words = []
        for wi in range(int(rng.integers(1, 7))):
            start = cursor + float(rng.uniform(0, 0.2))
            end = start + float(rng.uniform(min_word_s, max_word_s))
            words.append(Word(f"w{si}_{wi}", start, end,
                              LABEL_POOL[int(rng.integers(len(LABEL_POOL)))]))
            cursor = end
        sentences.append(Sentence(f"s{si}", tuple(words)))
        cursor += float(rng.uniform(0.05, 0.4))
    return Recording(rec_id, speaker_id, cursor + tail_s, tuple(sentences))


def spaced_boundary_recording(rng: np.random.Generator,
                              rec_id: str = "rec",
                              n_boundaries: int = 8,
                              min_spacing_s: float = 0.45) -> Recording:
    """One-sentence-per-boundary recording whose prosodic boundaries are all
    at least min_spacing_s apart (and away from the signal edges)."""
    words = []
    cursor = float(rng.uniform(0.3, 0.6))
    for i in range(n_boundaries):
        start = cursor
        dur = float(rng.uniform(0.2, 0.4))
        end = start + dur
        label = Boundary.PROSODIC if rng.random() < 0.7 else Boundary.NONE
        words.append(Word(f"w{i}", start, end, label))
        gap = max(0.05, min_spacing_s - dur) + float(rng.uniform(0, 0.3))
        cursor = end + gap
    duration = max(w.end_s for w in words) + 0.5
    return Recording(rec_id, "spk", duration,
                     (Sentence("s0", tuple(words)),))


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)
