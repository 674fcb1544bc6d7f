"""Synthetic toy corpora: tone "words" with planted inter-phrase pauses.

Generates WAV audio plus matching annotation files where every prosodic
boundary is backed by a silent pause long enough for the acoustic baseline
to find, and intermediate boundaries get short pauses that stay below the
default detection threshold. Useful for smoke-testing the full pipeline
without any real speech data.

All durations are multiples of the 20 ms frame period so planted pauses
line up exactly with the analysis frame grid.
"""

from __future__ import annotations

import argparse
from pathlib import Path

import numpy as np

from .corpus import Boundary, Recording, Sentence, Word, serialize_annotations

SAMPLE_RATE = 16000
_STEP = 0.02  # quantum for all synthetic durations


def _tone(duration_s: float, freq: float, sample_rate: int) -> np.ndarray:
    t = np.arange(int(round(duration_s * sample_rate))) / sample_rate
    # Mild amplitude wobble, never dipping near silence.
    env = 0.28 + 0.05 * np.sin(2 * np.pi * 2.5 * t)
    return env * np.sin(2 * np.pi * freq * t)


def synth_recording(
    rec_id: str,
    speaker_id: str,
    n_sentences: int,
    rng: np.random.Generator,
    sample_rate: int = SAMPLE_RATE,
) -> tuple[Recording, np.ndarray]:
    """Build one annotated recording and its audio."""
    pieces: list[np.ndarray] = []
    sentences = []
    cursor = 0.0
    word_no = 0

    def emit_silence(duration_s: float):
        nonlocal cursor
        pieces.append(np.zeros(int(round(duration_s * sample_rate))))
        cursor += duration_s

    for si in range(n_sentences):
        words = []
        n_phrases = int(rng.integers(2, 5))
        for pi in range(n_phrases):
            for _ in range(int(rng.integers(2, 5))):
                dur = _STEP * int(rng.integers(10, 21))  # 0.20 .. 0.40 s
                freq = float(rng.uniform(150, 350))
                pieces.append(_tone(dur, freq, sample_rate))
                start = cursor
                cursor += dur
                words.append(Word(f"w{word_no}", start, cursor))
                word_no += 1
            last_phrase = pi == n_phrases - 1
            if not last_phrase and rng.random() < 0.25:
                label = Boundary.INTERMEDIATE
                pause = _STEP * int(rng.integers(4, 7))  # 0.08 .. 0.12 s
            else:
                label = Boundary.PROSODIC
                pause = _STEP * int(rng.integers(15, 26))  # 0.30 .. 0.50 s
            words[-1] = Word(words[-1].text, words[-1].start_s,
                             words[-1].end_s, label)
            emit_silence(pause)
        sentences.append(Sentence(f"{rec_id}-s{si:03d}", tuple(words)))

    rec = Recording(rec_id, speaker_id, round(cursor, 6), tuple(sentences))
    return rec, np.concatenate(pieces)


def synth_corpus(
    out_dir: str | Path,
    n_recordings: int = 5,
    sentences_per_recording: int = 10,
    seed: int = 0,
    sample_rate: int = SAMPLE_RATE,
) -> list[Recording]:
    """Write ``<rec>.json`` + ``<rec>.wav`` pairs; returns the recordings."""
    from scipy.io import wavfile

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)
    recs = []
    for r in range(n_recordings):
        rec_id = f"rec{r:02d}"
        rec, audio = synth_recording(rec_id, f"spk{r:02d}",
                                     sentences_per_recording, rng, sample_rate)
        serialize_annotations(rec, out_dir / f"{rec_id}.json")
        wavfile.write(out_dir / f"{rec_id}.wav", sample_rate,
                      (audio * 32767).astype(np.int16))
        recs.append(rec)
    return recs


def main(argv=None):
    ap = argparse.ArgumentParser(
        description="Generate a synthetic demo corpus (audio + annotations)."
    )
    ap.add_argument("out_dir")
    ap.add_argument("--recordings", type=int, default=5)
    ap.add_argument("--sentences", type=int, default=10)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    recs = synth_corpus(args.out_dir, args.recordings, args.sentences, args.seed)
    total = sum(len(s.words) for r in recs for s in r.sentences)
    print(f"wrote {len(recs)} recordings, "
          f"{sum(len(r.sentences) for r in recs)} sentences, {total} words "
          f"to {args.out_dir}")


if __name__ == "__main__":
    main()
