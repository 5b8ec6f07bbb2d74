"""Objective-agnostic text-time ranking baseline.

Keyword-matching items are ranked by how close their posting time lies
to the busiest UTC hour of the event; the proximity anchor is the
midpoint of that hour and distances are measured in seconds so the order
is total.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from datetime import datetime, timedelta, timezone
from typing import Iterable, Sequence

from .data import DatasetManifest, keyword_match
from .errors import ValidationError
from .metrics import RankedList

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class TweetItem:
    id: str
    timestamp: datetime
    text: str | None = None

    def __post_init__(self):
        if self.timestamp is None:
            raise ValidationError(f"item '{self.id}' lacks a timestamp")


def items_from_manifest(manifest: DatasetManifest) -> list[TweetItem]:
    """Convert manifest records; records without a timestamp are dropped."""
    items = []
    skipped = 0
    for rec in manifest.records:
        if rec.timestamp is None:
            skipped += 1
            continue
        items.append(TweetItem(id=rec.id, timestamp=rec.timestamp, text=rec.text))
    if skipped:
        log.warning("dropped %d records without timestamps", skipped)
    return items


def _hour_bucket(ts: datetime) -> datetime:
    if ts.tzinfo is None:
        ts = ts.replace(tzinfo=timezone.utc)
    return ts.astimezone(timezone.utc).replace(minute=0, second=0, microsecond=0)


def peak_hour(items: Sequence[TweetItem], keywords: Iterable[str]) -> datetime:
    """UTC calendar hour with the most keyword-matching items.

    Ties resolve to the earliest hour.
    """
    keywords = list(keywords)
    counts: dict[datetime, int] = {}
    for item in items:
        if keyword_match(item.text, keywords):
            bucket = _hour_bucket(item.timestamp)
            counts[bucket] = counts.get(bucket, 0) + 1
    if not counts:
        raise ValidationError("no keyword-matching items with timestamps")
    return min(counts, key=lambda h: (-counts[h], h))


def rank_by_text_time(items: Sequence[TweetItem],
                      keywords: Iterable[str]) -> RankedList:
    """Rank keyword-matching items by proximity to the peak hour midpoint.

    The emitted score is the negative absolute offset in seconds, so
    closer items score higher; equal offsets order by ascending id.
    Non-matching items are excluded entirely.
    """
    keywords = list(keywords)
    anchor = peak_hour(items, keywords) + timedelta(minutes=30)
    scores = {}
    for item in items:
        if not keyword_match(item.text, keywords):
            continue
        ts = item.timestamp
        if ts.tzinfo is None:
            ts = ts.replace(tzinfo=timezone.utc)
        offset = abs((ts - anchor).total_seconds())
        scores[item.id] = -offset
    return RankedList.from_scores(scores)
