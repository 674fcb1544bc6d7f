import pytest

from prosobound.combine import (
    CombineMode,
    WordBoundarySet,
    combine,
    parse_external_predictions,
    validate_entries,
    write_external_predictions,
)
from prosobound.corpus import Boundary, Recording, Scope, Sentence, Word
from prosobound.errors import ParseError, ValidationError
from prosobound.metrics import count_corpus

from conftest import random_recording


def small_corpus():
    s1 = Sentence("s1", (Word("a", 0.0, 0.4), Word("b", 0.5, 0.9),
                         Word("c", 1.0, 1.4, Boundary.PROSODIC)))
    s2 = Sentence("s2", (Word("d", 1.8, 2.2, Boundary.PROSODIC),
                         Word("e", 2.3, 2.7)))
    return [Recording("r1", "spk1", 3.0, (s1, s2))]


def bset(*entries, origin="x"):
    return WordBoundarySet(frozenset(entries), origin=origin)


B1 = ("r1", "s1", 0)
B2 = ("r1", "s1", 1)
B3 = ("r1", "s2", 0)


def test_combine_set_semantics():
    a = bset(B1, B2, origin="A")
    b = bset(B2, B3, origin="B")
    assert combine(a, b, CombineMode.AND).entries == {B2}
    assert combine(a, b, CombineMode.OR).entries == {B1, B2, B3}
    assert "AND" in combine(a, b, CombineMode.AND).origin


def test_combine_empty_operand():
    a = bset(B1, B2)
    empty = bset()
    assert combine(a, empty, CombineMode.AND).entries == frozenset()
    assert combine(a, empty, CombineMode.OR).entries == a.entries


def test_combine_laws_random(rng):
    recs = [random_recording(rng, rec_id=f"r{i}") for i in range(2)]
    keys = [(r.id, s.id, wi) for r in recs for s, wi, _ in r.iter_words()]
    for _ in range(100):
        pick = lambda: frozenset(
            keys[j] for j in rng.choice(len(keys),
                                        size=int(rng.integers(0, len(keys))),
                                        replace=False))
        a, b = bset(*pick(), origin="A"), bset(*pick(), origin="B")
        both = combine(a, b, CombineMode.AND)
        either = combine(a, b, CombineMode.OR)
        assert both.entries == a.entries & b.entries
        assert either.entries == a.entries | b.entries
        assert both.entries <= a.entries <= either.entries
        assert both.entries <= b.entries <= either.entries
        assert len(either.entries) + len(both.entries) == len(a.entries) + len(b.entries)
        # commutative, idempotent
        assert combine(b, a, CombineMode.AND).entries == both.entries
        assert combine(a, a, CombineMode.OR).entries == a.entries

        # counted against the reference: AND can't beat either tp; OR can't
        # have fewer fp than either
        tp_a = count_corpus(a.entries, recs, Scope.ALL).tp
        tp_b = count_corpus(b.entries, recs, Scope.ALL).tp
        fp_a = count_corpus(a.entries, recs, Scope.ALL).fp
        fp_b = count_corpus(b.entries, recs, Scope.ALL).fp
        assert count_corpus(both.entries, recs, Scope.ALL).tp <= min(tp_a, tp_b)
        assert count_corpus(either.entries, recs, Scope.ALL).fp >= max(fp_a, fp_b)


def test_parse_external_predictions(tmp_path):
    recs = small_corpus()
    path = tmp_path / "t5.breaks.tsv"
    path.write_text("r1\ts1\ta | b c\nr1\ts2\td e |\n")
    got = parse_external_predictions(path, recs)
    assert got.entries == {("r1", "s1", 0), ("r1", "s2", 1)}
    assert got.origin == "t5.breaks.tsv"


def test_parse_external_word_count_mismatch(tmp_path):
    recs = small_corpus()
    path = tmp_path / "bad.tsv"
    path.write_text("r1\ts1\ta | b\n")
    with pytest.raises(ParseError, match="s1.*2 tokens.*3 words"):
        parse_external_predictions(path, recs)


def test_parse_external_errors(tmp_path):
    recs = small_corpus()
    path = tmp_path / "bad.tsv"
    path.write_text("r1\tsX\ta b c\n")
    with pytest.raises(ParseError, match="unknown sentence"):
        parse_external_predictions(path, recs)
    path.write_text("r1\ts1\t| a b c\n")
    with pytest.raises(ParseError, match="before any word"):
        parse_external_predictions(path, recs)
    path.write_text("r1 s1\n")
    with pytest.raises(ParseError, match="3 tab-separated"):
        parse_external_predictions(path, recs)


def test_external_roundtrip(tmp_path, rng):
    for i in range(20):
        recs = [random_recording(rng, rec_id=f"r{i}_{k}") for k in range(2)]
        keys = [(r.id, s.id, wi) for r in recs for s, wi, _ in r.iter_words()]
        picked = frozenset(keys[j] for j in
                           rng.choice(len(keys),
                                      size=int(rng.integers(0, len(keys))),
                                      replace=False))
        original = WordBoundarySet(picked, origin="rand")
        path = tmp_path / f"rt{i}.tsv"
        write_external_predictions(original, recs, path)
        back = parse_external_predictions(path, recs)
        assert back.entries == original.entries


def test_validate_entries():
    recs = small_corpus()
    validate_entries([B1, B3], recs)
    with pytest.raises(ValidationError, match="unknown word"):
        validate_entries([("r1", "s1", 99)], recs)
    with pytest.raises(ValidationError, match="unknown word"):
        validate_entries([("zzz", "s1", 0)], recs)


def test_write_rejects_unencodable_words(tmp_path):
    rec = Recording("r1", "spk", 1.0, (Sentence("s1", (
        Word("two words", 0.0, 0.5),)),))
    with pytest.raises(ValidationError, match="cannot be encoded"):
        write_external_predictions(bset(), [rec], tmp_path / "x.tsv")
