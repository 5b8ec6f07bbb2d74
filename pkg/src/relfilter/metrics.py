"""Ranking evaluation: average precision, mAP, PR curves, best-F1 search.

AP here is the uninterpolated IR definition

    AP = (1/R) * sum_k P(k) * rel(k)

with R the number of relevant items present in the ranking, which equals
the rectangular area under the (recall, precision) curve emitted by
``pr_curve``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .errors import UndefinedMetricError, ValidationError


@dataclass(frozen=True)
class RankedList:
    """Ordered (id, score) pairs with non-increasing scores and unique ids."""

    entries: tuple[tuple[str, float], ...]

    def __post_init__(self):
        seen = set()
        prev = math.inf
        for item_id, score in self.entries:
            if item_id in seen:
                raise ValidationError(f"duplicate id '{item_id}' in ranking")
            seen.add(item_id)
            if score > prev:
                raise ValidationError("ranking scores must be non-increasing")
            prev = score

    @classmethod
    def from_scores(cls, scores: Mapping[str, float]) -> "RankedList":
        """Materialize a ranking: descending score, ties by ascending id."""
        ordered = sorted(scores.items(), key=lambda kv: (-kv[1], kv[0]))
        return cls(entries=tuple((i, float(s)) for i, s in ordered))

    def __len__(self) -> int:
        return len(self.entries)

    def ids(self) -> list[str]:
        return [item_id for item_id, _ in self.entries]

    def scores(self) -> dict[str, float]:
        return {item_id: score for item_id, score in self.entries}


@dataclass(frozen=True)
class PRCurve:
    """One (recall, precision) point per ranking position."""

    points: tuple[tuple[float, float], ...]

    def area(self) -> float:
        """Rectangular area; identical to average_precision by construction."""
        total = 0.0
        prev_recall = 0.0
        for recall, precision in self.points:
            total += (recall - prev_recall) * precision
            prev_recall = recall
        return total


def _relevance_flags(ranking: RankedList, relevant: Iterable[str]) -> list[bool]:
    relevant = set(relevant)
    return [item_id in relevant for item_id, _ in ranking.entries]


def average_precision(ranking: RankedList, relevant: Iterable[str],
                      tie_average: bool = False) -> float:
    """Uninterpolated AP of ``ranking`` against the ``relevant`` id set.

    With ``tie_average`` the expectation of AP over uniformly random
    reorderings of equal-score groups is returned instead of the AP of
    the materialized order, which is useful for tie sensitivity checks.

    Raises UndefinedMetricError when no relevant item appears in the
    ranking (surfacing evaluation mistakes instead of reporting 0).
    """
    flags = _relevance_flags(ranking, relevant)
    total_relevant = sum(flags)
    if total_relevant == 0:
        raise UndefinedMetricError("no relevant items present in the ranking")
    if tie_average:
        return _tie_averaged_ap(ranking, flags, total_relevant)
    # computed as the PR-curve area so the two agree bit for bit
    return pr_curve(ranking, relevant).area()


def _tie_averaged_ap(ranking: RankedList, flags: Sequence[bool],
                     total_relevant: int) -> float:
    """Expected AP over random permutations within equal-score groups.

    For a group of g items holding r relevant ones after s earlier items
    and R_b earlier relevant items, the expected precision mass is

        sum_k (r/g) * (R_b + 1 + (k-1)(r-1)/(g-1)) / (s+k)

    which follows from E[#relevant among the group's first k | slot k
    relevant] = 1 + (k-1)(r-1)/(g-1).
    """
    acc = 0.0
    before_relevant = 0
    pos = 0
    i = 0
    entries = ranking.entries
    n = len(entries)
    while i < n:
        j = i
        while j < n and entries[j][1] == entries[i][1]:
            j += 1
        g = j - i
        r = sum(flags[i:j])
        if r > 0:
            if g == 1:
                acc += (before_relevant + 1) / (pos + 1)
            else:
                for k in range(1, g + 1):
                    expected_hits = 1 + (k - 1) * (r - 1) / (g - 1)
                    acc += (r / g) * (before_relevant + expected_hits) / (pos + k)
        before_relevant += r
        pos += g
        i = j
    return acc / total_relevant


def mean_ap(per_objective_aps: Mapping[str, float]) -> float:
    """Unweighted arithmetic mean of per-objective AP values."""
    if not per_objective_aps:
        raise UndefinedMetricError("mean AP of an empty map is undefined")
    values = list(per_objective_aps.values())
    return sum(values) / len(values)


def pr_curve(ranking: RankedList, relevant: Iterable[str]) -> PRCurve:
    """(recall@k, precision@k) for every position k.

    Recall is measured against the relevant items present in the ranking,
    so the final point always reaches recall 1 when any exist.
    """
    flags = _relevance_flags(ranking, relevant)
    total_relevant = sum(flags)
    if total_relevant == 0:
        raise UndefinedMetricError("no relevant items present in the ranking")
    points = []
    hits = 0
    for k, flag in enumerate(flags, 1):
        if flag:
            hits += 1
        points.append((hits / total_relevant, hits / k))
    return PRCurve(points=tuple(points))


def best_f1(scores: Mapping[str, float],
            labels: Mapping[str, bool]) -> tuple[float, float, float, float]:
    """Maximize F1 of the rule ``score >= threshold`` over all thresholds.

    Candidate thresholds are the distinct score values plus +inf (the
    empty prediction, whose F1 is defined as 0).  Ties are broken toward
    the larger threshold, i.e. fewer accepted items.

    Returns (threshold, f1, precision, recall).
    """
    missing = set(scores) - set(labels)
    if missing:
        raise ValidationError(f"no label for scored ids: {sorted(missing)[:5]}")
    n_pos = sum(1 for i in scores if labels[i])
    if n_pos == 0:
        raise UndefinedMetricError("best_f1 requires at least one positive label")

    # descending sweep: every prefix of equal-score groups is one candidate
    ordered = sorted(scores.items(), key=lambda kv: -kv[1])
    best = (math.inf, 0.0, 0.0, 0.0)
    tp = 0
    accepted = 0
    i = 0
    n = len(ordered)
    while i < n:
        theta = ordered[i][1]
        j = i
        while j < n and ordered[j][1] == theta:
            if labels[ordered[j][0]]:
                tp += 1
            accepted += 1
            j += 1
        # F1 = 2TP / (2TP + FP + FN) = 2TP / (accepted + n_pos)
        f1 = 2 * tp / (accepted + n_pos)
        if f1 > best[1]:
            precision = tp / accepted
            recall = tp / n_pos
            best = (theta, f1, precision, recall)
        i = j
    return best
