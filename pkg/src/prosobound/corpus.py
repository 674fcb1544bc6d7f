"""Data model and file I/O for annotated recordings.

A recording is a time-aligned transcript: sentences of words with start/end
times, where each word carries the boundary label observed *after* it
(none, intermediate, or prosodic). Boundary positions are canonically the
word's end time. The sentence-final word's label represents the
end-of-sentence boundary; inter-sentence pauses carry no label of their own.

Annotation files are JSON:

    {"recording_id": ..., "speaker_id": ..., "duration_s": ...,
     "sentences": [{"id": ..., "words": [
         {"text": ..., "start_s": ..., "end_s": ...,
          "boundary_after": "none"|"intermediate"|"prosodic"}]}]}
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterator

from .errors import ParseError, ValidationError
from .report import write_text_atomic


class Boundary(Enum):
    """Boundary label attached after a word."""

    NONE = "none"
    INTERMEDIATE = "intermediate"
    PROSODIC = "prosodic"


class BoundaryKind(Enum):
    """Which boundary labels an operation considers."""

    PROSODIC_ONLY = "prosodic"
    PROSODIC_AND_INTERMEDIATE = "prosodic+intermediate"


class Scope(Enum):
    """Candidate-position scope for detection and evaluation.

    WITHIN_SENTENCE drops each sentence's final word boundary, matching
    evaluation regimes that only consider breaks inside a sentence.
    """

    ALL = "all"
    WITHIN_SENTENCE = "within-sentence"


@dataclass(frozen=True)
class Word:
    text: str
    start_s: float
    end_s: float
    boundary_after: Boundary = Boundary.NONE


@dataclass(frozen=True)
class Sentence:
    id: str
    words: tuple[Word, ...]


@dataclass(frozen=True)
class Recording:
    id: str
    speaker_id: str
    duration_s: float
    sentences: tuple[Sentence, ...]

    def iter_words(self) -> Iterator[tuple[Sentence, int, Word]]:
        """Yield (sentence, word_index, word) in time order."""
        for sent in self.sentences:
            for i, word in enumerate(sent.words):
                yield sent, i, word

    def word_count(self) -> int:
        return sum(len(s.words) for s in self.sentences)


def validate_recording(rec: Recording) -> None:
    """Check all data-model invariants, raising ValidationError on the first
    violation. The message names the offending sentence/word."""
    if not rec.sentences:
        raise ValidationError(f"recording '{rec.id}': no sentences")
    if rec.duration_s <= 0:
        raise ValidationError(f"recording '{rec.id}': duration_s must be > 0")

    for sent in rec.sentences:
        if not sent.words:
            raise ValidationError(
                f"recording '{rec.id}', sentence '{sent.id}': empty word list"
            )
        prev = None
        for i, w in enumerate(sent.words):
            where = f"recording '{rec.id}', sentence '{sent.id}', word {i} ('{w.text}')"
            if not 0 <= w.start_s < w.end_s:
                raise ValidationError(f"{where}: need 0 <= start_s < end_s, "
                                      f"got [{w.start_s}, {w.end_s}]")
            if w.end_s > rec.duration_s:
                raise ValidationError(
                    f"{where}: end_s {w.end_s} exceeds duration {rec.duration_s}"
                )
            if prev is not None and w.start_s < prev.end_s:
                raise ValidationError(
                    f"{where}: starts at {w.start_s} before previous word "
                    f"ends at {prev.end_s}"
                )
            prev = w

    # A word end is the alignment target for a boundary; duplicates across
    # sentences would make that target ambiguous.
    seen: dict[float, str] = {}
    for sent, i, w in rec.iter_words():
        if w.end_s in seen:
            raise ValidationError(
                f"recording '{rec.id}': words in sentences '{seen[w.end_s]}' and "
                f"'{sent.id}' share the end time {w.end_s}"
            )
        seen[w.end_s] = sent.id

    for a, b in zip(rec.sentences, rec.sentences[1:]):
        if b.words[0].start_s < a.words[-1].end_s:
            raise ValidationError(
                f"recording '{rec.id}': sentence '{b.id}' starts at "
                f"{b.words[0].start_s} before sentence '{a.id}' ends at "
                f"{a.words[-1].end_s}"
            )


def _get(obj: dict, key: str, kind, where: str):
    if key not in obj:
        raise ParseError(f"{where}: missing field '{key}'")
    val = obj[key]
    if kind is float and isinstance(val, int) and not isinstance(val, bool):
        val = float(val)
    if not isinstance(val, kind):
        raise ParseError(f"{where}.{key}: expected {kind.__name__}, "
                         f"got {type(val).__name__}")
    return val


def parse_annotations(path: str | Path) -> Recording:
    """Read one annotation file into a validated Recording."""
    path = Path(path)
    try:
        with open(path, encoding="utf-8") as f:
            doc = json.load(f)
    except OSError as e:
        raise ParseError(f"{path}: {e.strerror or e}") from e
    except json.JSONDecodeError as e:
        raise ParseError(f"{path}: invalid JSON at line {e.lineno}, "
                         f"column {e.colno}: {e.msg}") from e

    if not isinstance(doc, dict):
        raise ParseError(f"{path}: top level must be an object")

    where = str(path)
    sentences = []
    raw_sents = _get(doc, "sentences", list, where)
    for si, raw_sent in enumerate(raw_sents):
        s_where = f"{where}: sentences[{si}]"
        if not isinstance(raw_sent, dict):
            raise ParseError(f"{s_where}: expected object")
        words = []
        for wi, raw_word in enumerate(_get(raw_sent, "words", list, s_where)):
            w_where = f"{s_where}.words[{wi}]"
            if not isinstance(raw_word, dict):
                raise ParseError(f"{w_where}: expected object")
            label_str = _get(raw_word, "boundary_after", str, w_where)
            try:
                label = Boundary(label_str)
            except ValueError:
                valid = ", ".join(b.value for b in Boundary)
                raise ParseError(f"{w_where}.boundary_after: '{label_str}' "
                                 f"is not one of {valid}") from None
            words.append(Word(
                text=_get(raw_word, "text", str, w_where),
                start_s=_get(raw_word, "start_s", float, w_where),
                end_s=_get(raw_word, "end_s", float, w_where),
                boundary_after=label,
            ))
        sentences.append(Sentence(id=_get(raw_sent, "id", str, s_where),
                                  words=tuple(words)))

    rec = Recording(
        id=_get(doc, "recording_id", str, where),
        speaker_id=_get(doc, "speaker_id", str, where),
        duration_s=_get(doc, "duration_s", float, where),
        sentences=tuple(sentences),
    )
    validate_recording(rec)
    return rec


def serialize_annotations(rec: Recording, path: str | Path) -> None:
    """Write a Recording back to the annotation format (lossless round trip)."""
    doc = {
        "recording_id": rec.id,
        "speaker_id": rec.speaker_id,
        "duration_s": rec.duration_s,
        "sentences": [
            {
                "id": s.id,
                "words": [
                    {
                        "text": w.text,
                        "start_s": w.start_s,
                        "end_s": w.end_s,
                        "boundary_after": w.boundary_after.value,
                    }
                    for w in s.words
                ],
            }
            for s in rec.sentences
        ],
    }
    write_text_atomic(path, json.dumps(doc, indent=2, ensure_ascii=False) + "\n")


def load_corpus(path: str | Path) -> list[Recording]:
    """Load all annotation files from a directory (``*.json``, sorted by
    name) or a single file. Recording ids must be unique."""
    path = Path(path)
    files = sorted(path.glob("*.json")) if path.is_dir() else [path]
    if not files:
        raise ParseError(f"{path}: no annotation files (*.json) found")
    recs = [parse_annotations(f) for f in files]
    seen: set[str] = set()
    for rec in recs:
        if rec.id in seen:
            raise ValidationError(f"duplicate recording id '{rec.id}' in corpus")
        seen.add(rec.id)
    return recs


def matches_kind(label: Boundary, kind: BoundaryKind) -> bool:
    if label is Boundary.PROSODIC:
        return True
    return (label is Boundary.INTERMEDIATE
            and kind is BoundaryKind.PROSODIC_AND_INTERMEDIATE)


def reference_boundaries(
    rec: Recording, kind: BoundaryKind, scope: Scope = Scope.ALL
) -> list[tuple[float, Boundary]]:
    """Boundary positions as (word end time, label), in increasing time order.

    scope=WITHIN_SENTENCE omits each sentence's final word boundary.
    """
    out = []
    for sent in rec.sentences:
        last = len(sent.words) - 1
        for i, w in enumerate(sent.words):
            if scope is Scope.WITHIN_SENTENCE and i == last:
                continue
            if matches_kind(w.boundary_after, kind):
                out.append((w.end_s, w.boundary_after))
    return out


def filter_speakers(
    recs: list[Recording],
    include: set[str] | None = None,
    exclude: set[str] | None = None,
) -> list[Recording]:
    """Restrict a corpus to a speaker subset. Unknown speaker names in either
    list raise ValidationError (they usually indicate a typo)."""
    known = {r.speaker_id for r in recs}
    for name, wanted in (("include", include), ("exclude", exclude)):
        unknown = (wanted or set()) - known
        if unknown:
            raise ValidationError(
                f"unknown speaker(s) in {name} list: {', '.join(sorted(unknown))}"
            )
    out = recs
    if include is not None:
        out = [r for r in out if r.speaker_id in include]
    if exclude:
        out = [r for r in out if r.speaker_id not in exclude]
    return out


__all__ = [
    "Boundary", "BoundaryKind", "Scope", "Word", "Sentence", "Recording",
    "validate_recording", "parse_annotations", "serialize_annotations",
    "load_corpus", "matches_kind", "reference_boundaries", "filter_speakers",
]
