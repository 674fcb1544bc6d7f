"""Fuse word-level boundary prediction sets from different predictors.

Combination works purely on word positions (peak values are dropped):
AND keeps boundaries both predictors marked, trading recall for precision;
OR keeps boundaries either predictor marked, trading the other way.

External prediction format, one sentence per line:

    recording_id<TAB>sentence_id<TAB>tokens

where tokens are the sentence's words separated by single spaces and a
literal ``|`` token marks a predicted boundary after the preceding word:

    rec1    s1    a word | another word
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterable, Sequence

from .corpus import Recording
from .errors import ParseError, ValidationError
from .metrics import WordKey
from .report import write_text_atomic


class CombineMode(Enum):
    AND = "and"
    OR = "or"


@dataclass(frozen=True)
class WordBoundarySet:
    entries: frozenset[WordKey]
    origin: str = ""


def combine(a: WordBoundarySet, b: WordBoundarySet,
            mode: CombineMode) -> WordBoundarySet:
    """AND -> exact intersection, OR -> exact union of the two sets."""
    if mode is CombineMode.AND:
        entries = a.entries & b.entries
    else:
        entries = a.entries | b.entries
    op = mode.name
    return WordBoundarySet(entries, origin=f"({a.origin} {op} {b.origin})")


def validate_entries(entries: Iterable[WordKey],
                     recs: Sequence[Recording]) -> None:
    """Every entry must name an existing word of the corpus."""
    known: set[WordKey] = set()
    for rec in recs:
        for sent, i, _ in rec.iter_words():
            known.add((rec.id, sent.id, i))
    for e in entries:
        if tuple(e) not in known:
            raise ValidationError(
                f"boundary entry references unknown word: recording '{e[0]}', "
                f"sentence '{e[1]}', word {e[2]}"
            )


def _sentence_index(recs: Sequence[Recording]):
    idx = {}
    for rec in recs:
        for sent in rec.sentences:
            idx[(rec.id, sent.id)] = sent
    return idx


def parse_external_predictions(path: str | Path,
                               recs: Sequence[Recording]) -> WordBoundarySet:
    """Read a break-marked token file, validating word counts against the
    corpus annotations (exact agreement, matched by position)."""
    path = Path(path)
    sentences = _sentence_index(recs)
    entries: set[WordKey] = set()
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as e:
        raise ParseError(f"{path}: {e.strerror or e}") from e

    for ln, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise ParseError(
                f"{path}: line {ln}: expected 3 tab-separated fields, "
                f"got {len(parts)}"
            )
        rec_id, sent_id, token_text = parts
        sent = sentences.get((rec_id, sent_id))
        if sent is None:
            raise ParseError(
                f"{path}: line {ln}: unknown sentence '{sent_id}' in "
                f"recording '{rec_id}'"
            )
        n_words = 0
        for tok in token_text.split():
            if tok == "|":
                if n_words == 0:
                    raise ParseError(
                        f"{path}: line {ln}: '|' before any word in "
                        f"sentence '{sent_id}'"
                    )
                entries.add((rec_id, sent_id, n_words - 1))
            else:
                n_words += 1
        if n_words != len(sent.words):
            raise ParseError(
                f"{path}: line {ln}: sentence '{sent_id}' has {n_words} "
                f"tokens but the annotation has {len(sent.words)} words"
            )
    return WordBoundarySet(frozenset(entries), origin=path.name)


def write_external_predictions(boundary_set: WordBoundarySet,
                               recs: Sequence[Recording],
                               path: str | Path) -> None:
    """Write a set in the break-marked token format, one line per corpus
    sentence (sentences without predictions included, so files align)."""
    entries = boundary_set.entries
    validate_entries(entries, recs)
    lines = []
    for rec in recs:
        for sent in rec.sentences:
            tokens = []
            for i, w in enumerate(sent.words):
                if not w.text or any(ch.isspace() for ch in w.text) or w.text == "|":
                    raise ValidationError(
                        f"word '{w.text}' in sentence '{sent.id}' cannot be "
                        f"encoded in the token format"
                    )
                tokens.append(w.text)
                if (rec.id, sent.id, i) in entries:
                    tokens.append("|")
            lines.append(f"{rec.id}\t{sent.id}\t{' '.join(tokens)}")
    write_text_atomic(path, "\n".join(lines) + "\n")


__all__ = [
    "CombineMode", "WordBoundarySet", "combine", "validate_entries",
    "parse_external_predictions", "write_external_predictions",
]
