"""Toy corpus builder for trainer tests: tone words, silent pauses at
prosodic boundaries, written in the annotation + WAV formats the detection
pipeline defines."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import pytest
from scipy.io import wavfile

SR = 16000
STEP = 0.02


def _tone(duration_s, freq, rng):
    t = np.arange(int(round(duration_s * SR))) / SR
    return (0.3 + 0.04 * np.sin(2 * np.pi * 3.0 * t)) * np.sin(2 * np.pi * freq * t)


def make_recording(rec_id: str, speaker_id: str, n_sentences: int,
                   rng: np.random.Generator):
    pieces, sentences = [], []
    cursor = 0.0
    for si in range(n_sentences):
        words = []
        for pi in range(int(rng.integers(2, 4))):
            for wi in range(int(rng.integers(2, 4))):
                dur = STEP * int(rng.integers(10, 20))
                pieces.append(_tone(dur, float(rng.uniform(160, 320)), rng))
                words.append({"text": f"w{si}_{pi}_{wi}", "start_s": cursor,
                              "end_s": cursor + dur, "boundary_after": "none"})
                cursor += dur
            if pi < 2 and rng.random() < 0.3:
                words[-1]["boundary_after"] = "intermediate"
                pause = STEP * int(rng.integers(4, 7))
            else:
                words[-1]["boundary_after"] = "prosodic"
                pause = STEP * int(rng.integers(15, 26))
            pieces.append(np.zeros(int(round(pause * SR))))
            cursor += pause
        sentences.append({"id": f"{rec_id}-s{si}", "words": words})
    doc = {"recording_id": rec_id, "speaker_id": speaker_id,
           "duration_s": round(cursor, 6), "sentences": sentences}
    return doc, np.concatenate(pieces)


def write_corpus(out: Path, spec: list[tuple[str, str, int]], seed=0):
    out.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)
    for rec_id, speaker, n_sentences in spec:
        doc, audio = make_recording(rec_id, speaker, n_sentences, rng)
        (out / f"{rec_id}.json").write_text(json.dumps(doc, indent=2))
        wavfile.write(out / f"{rec_id}.wav", SR,
                      (audio * 32767).astype(np.int16))
    return out


@pytest.fixture(scope="session")
def toy_corpus(tmp_path_factory):
    """Three short recordings, three speakers, well under two minutes."""
    return write_corpus(tmp_path_factory.mktemp("toycorpus"),
                        [("tr00", "tspk0", 6), ("tr01", "tspk1", 6),
                         ("tr02", "tspk2", 5)])


@pytest.fixture(scope="session")
def trained(tmp_path_factory, toy_corpus):
    """One shared training run: three seeds, five epochs."""
    from boundtune.train import TrainSpec, finetune

    out = tmp_path_factory.mktemp("trained")
    spec = TrainSpec(corpus=str(toy_corpus), out_dir=str(out),
                     chunk_len_s=10.0, step_s=5.0, epochs=5,
                     learning_rate=3e-3, seeds=(0, 1, 2))
    checkpoints = finetune(spec)
    return out, spec, checkpoints
