"""Dataset manifests, relevance labels, query sets, keyword matching and splits.

A manifest is a JSON-Lines file, one record per line:

    {"id": str, "path": str?, "timestamp": RFC3339?, "text": str?,
     "labels": {"flooding": bool, "depth": bool, "pollution": bool}?,
     "query_of": ["flooding"|"depth"|"pollution", ...]?}

Unknown top-level fields are ignored so manifests can carry extra metadata.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from datetime import datetime, timezone
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping

from .errors import (
    EmptyDatasetError,
    ManifestParseError,
    ParameterError,
    ValidationError,
)

OBJECTIVES = ("flooding", "depth", "pollution")

DEFAULT_KEYWORDS_RESOURCE = "keywords_de.txt"


def parse_timestamp(value: str) -> datetime:
    """Parse an RFC3339 timestamp into an aware UTC datetime.

    A trailing 'Z' is accepted; a timestamp without an offset is assumed
    to be UTC already.
    """
    text = value.strip()
    if text.endswith(("Z", "z")):
        text = text[:-1] + "+00:00"
    ts = datetime.fromisoformat(text)
    if ts.tzinfo is None:
        ts = ts.replace(tzinfo=timezone.utc)
    return ts.astimezone(timezone.utc)


def format_timestamp(ts: datetime) -> str:
    if ts.tzinfo is None:
        ts = ts.replace(tzinfo=timezone.utc)
    return ts.astimezone(timezone.utc).isoformat()


@dataclass(frozen=True)
class ImageRecord:
    """One image (or feature-only record) with its annotations.

    ``labels`` maps an objective to its relevance flag; objectives absent
    from the map are treated as unlabeled.  ``query_of`` lists the
    objectives for which this image serves as an ideal query; such an
    image must be labeled relevant for those objectives.
    """

    id: str
    path: str | None = None
    timestamp: datetime | None = None
    text: str | None = None
    labels: Mapping[str, bool] | None = None
    query_of: frozenset[str] = field(default_factory=frozenset)

    def __post_init__(self):
        if not self.id:
            raise ValidationError("record id must be nonempty")
        if self.labels is not None:
            for key, val in self.labels.items():
                if key not in OBJECTIVES:
                    raise ValidationError(
                        f"record '{self.id}': unknown objective '{key}' in labels")
                if not isinstance(val, bool):
                    raise ValidationError(
                        f"record '{self.id}': label '{key}' must be a bool")
        for obj in self.query_of:
            if obj not in OBJECTIVES:
                raise ValidationError(
                    f"record '{self.id}': unknown objective '{obj}' in query_of")
            if self.labels is None or self.labels.get(obj) is not True:
                raise ValidationError(
                    f"record '{self.id}': query of '{obj}' but not labeled relevant")

    def is_relevant(self, objective: str) -> bool | None:
        """True/False when labeled for ``objective``, None when unlabeled."""
        if objective not in OBJECTIVES:
            raise ParameterError(f"unknown objective '{objective}'")
        if self.labels is None:
            return None
        val = self.labels.get(objective)
        return val if isinstance(val, bool) else None

    def to_json_dict(self) -> dict:
        out: dict = {"id": self.id}
        if self.path is not None:
            out["path"] = self.path
        if self.timestamp is not None:
            out["timestamp"] = format_timestamp(self.timestamp)
        if self.text is not None:
            out["text"] = self.text
        if self.labels is not None:
            out["labels"] = dict(self.labels)
        if self.query_of:
            out["query_of"] = sorted(self.query_of)
        return out


@dataclass(frozen=True)
class DatasetManifest:
    """Ordered collection of records with unique ids."""

    records: tuple[ImageRecord, ...]
    objectives: tuple[str, ...] = OBJECTIVES

    def __post_init__(self):
        seen = set()
        for rec in self.records:
            if rec.id in seen:
                raise ValidationError(f"duplicate record id '{rec.id}'")
            seen.add(rec.id)

    def __len__(self) -> int:
        return len(self.records)

    def ids(self) -> list[str]:
        return [rec.id for rec in self.records]

    def get(self, record_id: str) -> ImageRecord:
        for rec in self.records:
            if rec.id == record_id:
                return rec
        raise KeyError(record_id)

    def by_id(self) -> dict[str, ImageRecord]:
        return {rec.id: rec for rec in self.records}

    def relevant_ids(self, objective: str) -> set[str]:
        return {r.id for r in self.records if r.is_relevant(objective) is True}

    def query_ids(self, objective: str) -> set[str]:
        if objective not in OBJECTIVES:
            raise ParameterError(f"unknown objective '{objective}'")
        return {r.id for r in self.records if objective in r.query_of}


@dataclass(frozen=True)
class Split:
    """Deterministic train/test partition of a manifest's ids."""

    train_ids: frozenset[str]
    test_ids: frozenset[str]
    seed: int
    train_fraction: float

    def __post_init__(self):
        if self.train_ids & self.test_ids:
            raise ValidationError("train and test ids overlap")


def _record_from_json(obj: dict, line_no: int) -> ImageRecord:
    if not isinstance(obj, dict):
        raise ManifestParseError(line_no, "record is not a JSON object")
    rec_id = obj.get("id")
    if not isinstance(rec_id, str) or not rec_id:
        raise ManifestParseError(line_no, "missing or empty 'id'")
    path = obj.get("path")
    if path is not None and not isinstance(path, str):
        raise ManifestParseError(line_no, "'path' must be a string")
    text = obj.get("text")
    if text is not None and not isinstance(text, str):
        raise ManifestParseError(line_no, "'text' must be a string")
    ts = None
    if obj.get("timestamp") is not None:
        try:
            ts = parse_timestamp(obj["timestamp"])
        except (ValueError, TypeError) as exc:
            raise ManifestParseError(line_no, f"bad timestamp: {exc}") from exc
    labels = obj.get("labels")
    query_of = obj.get("query_of") or ()
    try:
        return ImageRecord(
            id=rec_id,
            path=path,
            timestamp=ts,
            text=text,
            labels=labels,
            query_of=frozenset(query_of),
        )
    except ValidationError as exc:
        raise ManifestParseError(line_no, str(exc)) from exc


def load_manifest(path: str | Path) -> DatasetManifest:
    """Parse a JSON-Lines manifest; blank lines are skipped.

    Raises ManifestParseError with the offending line number on malformed
    input and ValidationError on duplicate ids.
    """
    records = []
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ManifestParseError(line_no, f"invalid JSON: {exc}") from exc
            records.append(_record_from_json(obj, line_no))
    return DatasetManifest(records=tuple(records))


def save_manifest(manifest: DatasetManifest, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for rec in manifest.records:
            fh.write(json.dumps(rec.to_json_dict(), ensure_ascii=False) + "\n")


def split_dataset(manifest: DatasetManifest, train_fraction: float | Fraction,
                  seed: int) -> Split:
    """Partition the manifest's ids into train and test sets.

    The id list is sorted lexicographically, shuffled with Python's
    Mersenne Twister (``random.Random(seed)``) and cut after
    round-half-up(train_fraction * n) elements, so the outcome depends
    only on the id set and the seed, not on manifest line order.
    """
    frac = Fraction(train_fraction)
    if not 0 < frac < 1:
        raise ParameterError(f"train_fraction must be in (0,1), got {train_fraction}")
    if len(manifest) == 0:
        raise EmptyDatasetError("cannot split an empty manifest")
    ids = sorted(manifest.ids())
    rng = random.Random(seed)
    rng.shuffle(ids)
    # exact rational arithmetic keeps the round-half-up rule float-proof
    n_train = int(frac * len(ids) + Fraction(1, 2))
    return Split(
        train_ids=frozenset(ids[:n_train]),
        test_ids=frozenset(ids[n_train:]),
        seed=seed,
        train_fraction=float(frac),
    )


def keyword_match(text: str | None, keywords: Iterable[str]) -> bool:
    """Case-insensitive substring match of any keyword in ``text``.

    Comparison uses Unicode case folding, so German umlauts and sharp s
    fold correctly. None text never matches.
    """
    if text is None:
        return False
    folded = text.casefold()
    return any(k.casefold() in folded for k in keywords)


def load_keywords(path: str | Path | None = None) -> list[str]:
    """Read a keyword list, one term per line; '#' lines and blanks skipped.

    Without a path, returns the packaged default list of eight German
    flood terms.
    """
    if path is None:
        raw = (resources.files("relfilter") / "config" /
               DEFAULT_KEYWORDS_RESOURCE).read_text(encoding="utf-8")
    else:
        raw = Path(path).read_text(encoding="utf-8")
    keywords = []
    for line in raw.splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            keywords.append(line)
    if not keywords:
        raise ValidationError("keyword list is empty")
    return keywords
