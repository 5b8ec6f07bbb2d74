"""Manifest parsing, labels, splits, and keyword matching."""

import json
from datetime import datetime, timedelta, timezone
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from conftest import make_manifest, make_record
from relfilter.data import (
    OBJECTIVES,
    DatasetManifest,
    ImageRecord,
    keyword_match,
    load_keywords,
    load_manifest,
    parse_timestamp,
    save_manifest,
    split_dataset,
)
from relfilter.errors import (
    EmptyDatasetError,
    ManifestParseError,
    ParameterError,
    ValidationError,
)

GERMAN_KEYWORDS = load_keywords()


# ------------------------------------------------------------------- loading


def test_three_wellformed_lines_give_three_records(tmp_path):
    lines = [
        {"id": "a", "path": "a.jpg"},
        {"id": "b", "text": "Hochwasser an der Elbe"},
        {"id": "c", "labels": {"flooding": True}},
    ]
    p = tmp_path / "m.jsonl"
    p.write_text("".join(json.dumps(l) + "\n" for l in lines), encoding="utf-8")
    manifest = load_manifest(p)
    assert len(manifest) == 3
    assert manifest.ids() == ["a", "b", "c"]


def test_duplicate_id_rejected(tmp_path):
    p = tmp_path / "m.jsonl"
    p.write_text('{"id": "a"}\n{"id": "a"}\n', encoding="utf-8")
    with pytest.raises(ValidationError, match="duplicate"):
        load_manifest(p)


def test_labels_survive_round_trip(tmp_path):
    rec = make_record("x", labels={"flooding": True, "depth": False,
                                   "pollution": False})
    save_manifest(make_manifest([rec]), tmp_path / "m.jsonl")
    back = load_manifest(tmp_path / "m.jsonl").get("x")
    assert back.is_relevant("flooding") is True
    assert back.is_relevant("depth") is False
    assert back.is_relevant("pollution") is False


def test_unlabeled_objective_reads_as_none():
    rec = make_record("x", labels={"flooding": True})
    assert rec.is_relevant("depth") is None
    assert make_record("y").is_relevant("flooding") is None


def test_parse_error_carries_line_number(tmp_path):
    p = tmp_path / "m.jsonl"
    p.write_text('{"id": "a"}\nnot json\n', encoding="utf-8")
    with pytest.raises(ManifestParseError) as exc_info:
        load_manifest(p)
    assert exc_info.value.line_no == 2
    assert "line 2" in str(exc_info.value)


def test_missing_id_is_a_parse_error(tmp_path):
    p = tmp_path / "m.jsonl"
    p.write_text('{"path": "a.jpg"}\n', encoding="utf-8")
    with pytest.raises(ManifestParseError, match="id"):
        load_manifest(p)


def test_blank_lines_skipped(tmp_path):
    p = tmp_path / "m.jsonl"
    p.write_text('{"id": "a"}\n\n   \n{"id": "b"}\n', encoding="utf-8")
    assert load_manifest(p).ids() == ["a", "b"]


def test_query_must_be_labeled_relevant():
    with pytest.raises(ValidationError, match="not labeled relevant"):
        ImageRecord(id="q", labels={"flooding": False},
                    query_of=frozenset({"flooding"}))
    with pytest.raises(ValidationError):
        ImageRecord(id="q", query_of=frozenset({"flooding"}))


def test_query_ids_filtered_by_objective():
    m = make_manifest([
        make_record("q1", labels={"flooding": True},
                    query_of=frozenset({"flooding"})),
        make_record("q2", labels={"depth": True}, query_of=frozenset({"depth"})),
        make_record("x"),
    ])
    assert m.query_ids("flooding") == {"q1"}
    assert m.query_ids("depth") == {"q2"}
    assert m.query_ids("pollution") == set()


def test_unknown_objective_rejected_everywhere():
    with pytest.raises(ValidationError):
        make_record("x", labels={"fire": True})
    with pytest.raises(ParameterError):
        make_record("x").is_relevant("fire")
    with pytest.raises(ParameterError):
        make_manifest([make_record("x")]).query_ids("fire")


# ---------------------------------------------------------------- timestamps


def test_timestamp_z_suffix_and_offsets():
    utc = parse_timestamp("2013-06-09T14:30:00Z")
    assert utc == datetime(2013, 6, 9, 14, 30, tzinfo=timezone.utc)
    offset = parse_timestamp("2013-06-09T16:30:00+02:00")
    assert offset == utc
    naive = parse_timestamp("2013-06-09T14:30:00")
    assert naive == utc


def test_bad_timestamp_reports_line(tmp_path):
    p = tmp_path / "m.jsonl"
    p.write_text('{"id": "a", "timestamp": "not-a-time"}\n', encoding="utf-8")
    with pytest.raises(ManifestParseError, match="timestamp"):
        load_manifest(p)


# ------------------------------------------------------------ round-trip law

_id_alphabet = "abcdefghijklmnopqrstuvwxyzäöüß0123456789_-."
_text_alphabet = _id_alphabet + " ,!?\"'ÜÖÄ haupt"

_labels_strategy = st.dictionaries(st.sampled_from(OBJECTIVES), st.booleans(),
                                   max_size=3)


@st.composite
def _records(draw, item_id):
    labels = draw(st.none() | _labels_strategy)
    true_objs = [o for o in (labels or {}) if labels[o]]
    query_of = frozenset(draw(st.sets(st.sampled_from(true_objs), max_size=3))
                         if true_objs else set())
    ts = None
    if draw(st.booleans()):
        base = draw(st.datetimes(min_value=datetime(2013, 1, 1),
                                 max_value=datetime(2018, 1, 1)))
        tz = timezone(timedelta(hours=draw(st.integers(-12, 12))))
        ts = base.replace(tzinfo=tz, microsecond=0)
    return ImageRecord(
        id=item_id,
        path=draw(st.none() | st.text(_id_alphabet, min_size=1, max_size=20)),
        timestamp=ts,
        text=draw(st.none() | st.text(_text_alphabet, max_size=40)),
        labels=labels,
        query_of=query_of,
    )


@st.composite
def _manifests(draw):
    ids = draw(st.sets(st.text(_id_alphabet, min_size=1, max_size=12),
                       min_size=1, max_size=8))
    return make_manifest([draw(_records(i)) for i in sorted(ids)])


@given(_manifests())
def test_manifest_round_trip_identity(tmp_path_factory, manifest):
    path = tmp_path_factory.mktemp("rt") / "m.jsonl"
    save_manifest(manifest, path)
    assert load_manifest(path) == manifest


# ------------------------------------------------------------------ splitting


def test_split_100_at_three_quarters():
    m = make_manifest([make_record(f"t{i:03d}") for i in range(100)])
    split = split_dataset(m, 0.75, seed=42)
    assert len(split.train_ids) == 75
    assert len(split.test_ids) == 25


def test_split_deterministic():
    m = make_manifest([make_record(f"t{i:03d}") for i in range(57)])
    assert split_dataset(m, 0.75, seed=9) == split_dataset(m, 0.75, seed=9)


def test_split_n4_sizes_and_seed_sensitivity():
    m = make_manifest([make_record(i) for i in "abcd"])
    assignments = set()
    for seed in range(100):
        split = split_dataset(m, 0.75, seed=seed)
        assert len(split.train_ids) == 3
        assert len(split.test_ids) == 1
        assert split.train_ids | split.test_ids == {"a", "b", "c", "d"}
        assignments.add(frozenset(split.train_ids))
    assert len(assignments) > 1


def test_split_independent_of_record_order():
    recs = [make_record(f"t{i}") for i in range(30)]
    a = split_dataset(make_manifest(recs), 0.75, seed=3)
    b = split_dataset(make_manifest(list(reversed(recs))), 0.75, seed=3)
    assert a == b


def test_split_sizes_follow_round_half_up():
    for n in (1, 2, 3, 7, 99, 250):
        m = make_manifest([make_record(f"t{i:04d}") for i in range(n)])
        for frac in (Fraction(3, 4), Fraction(1, 2), Fraction(9, 10)):
            split = split_dataset(m, frac, seed=0)
            assert len(split.train_ids) == oracles.train_size_exact(n, frac)


@given(st.integers(1, 1000), st.integers(0, 2**31))
def test_split_partitions_ids_exactly(n, seed):
    m = make_manifest([make_record(f"t{i:04d}") for i in range(n)])
    split = split_dataset(m, 0.75, seed=seed)
    assert split.train_ids | split.test_ids == set(m.ids())
    assert not (split.train_ids & split.test_ids)


def test_split_rejects_bad_fraction_and_empty():
    m = make_manifest([make_record("a")])
    for bad in (0.0, 1.0, -0.1, 1.5):
        with pytest.raises(ParameterError):
            split_dataset(m, bad, seed=0)
    with pytest.raises(EmptyDatasetError):
        split_dataset(make_manifest([]), 0.75, seed=0)


# ------------------------------------------------------------------ keywords


def test_packaged_keyword_list_has_eight_terms():
    assert len(GERMAN_KEYWORDS) == 8
    assert "Hochwasser" in GERMAN_KEYWORDS


def test_uppercase_keyword_hit():
    assert keyword_match("Das HOCHWASSER steigt", GERMAN_KEYWORDS) is True


def test_empty_text_no_match():
    assert keyword_match("", GERMAN_KEYWORDS) is False
    assert keyword_match(None, GERMAN_KEYWORDS) is False


def test_inflected_form_matches_as_substring():
    text = "überschwemmte Straße"
    assert keyword_match(text, GERMAN_KEYWORDS) is True
    assert any(oracles.contains_folded(text, k) for k in GERMAN_KEYWORDS)


@given(st.text(_text_alphabet, max_size=60))
def test_keyword_match_agrees_with_folding_oracle(text):
    got = keyword_match(text, GERMAN_KEYWORDS)
    want = any(oracles.contains_folded(text, k) for k in GERMAN_KEYWORDS)
    assert got == want


@given(st.text(_text_alphabet, max_size=40),
       st.lists(st.text(_id_alphabet, min_size=1, max_size=6), min_size=1,
                max_size=5))
def test_keyword_match_is_or_of_singletons(text, keywords):
    whole = keyword_match(text, keywords)
    split_up = any(keyword_match(text, [k]) for k in keywords)
    assert whole == split_up


def test_keyword_file_loading(tmp_path):
    p = tmp_path / "kw.txt"
    p.write_text("# comment\nFlut\n\n  Pegel  \n", encoding="utf-8")
    assert load_keywords(p) == ["Flut", "Pegel"]
    empty = tmp_path / "empty.txt"
    empty.write_text("# nothing\n", encoding="utf-8")
    with pytest.raises(ValidationError):
        load_keywords(empty)
