"""On-line hard-decision filtering with threshold calibration.

Each incoming item is scored independently and accepted iff its score
reaches the threshold (boundary included), so any permutation of the
stream yields the same accepted set as batch thresholding.  Per-item
failures are logged and reported without halting the stream.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping

import numpy as np

from .errors import RelfilterError
from .metrics import best_f1
from .retrieval import KdeParams, QuerySet, kde_similarity
from .svm import LinearModel, svm_score

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class StreamDecision:
    id: str
    score: float
    accepted: bool
    objective: str


class FilterState:
    """Immutable scoring rule plus accept/reject counters."""

    def __init__(self, scorer: Callable[[np.ndarray], float], threshold: float,
                 objective: str = ""):
        self._scorer = scorer
        self.threshold = float(threshold)
        self.objective = objective
        self.accepted = 0
        self.rejected = 0

    @classmethod
    def from_model(cls, model: LinearModel, threshold: float) -> "FilterState":
        return cls(scorer=lambda vec: svm_score(model, vec),
                   threshold=threshold, objective=model.objective)

    @classmethod
    def from_queries(cls, queries: QuerySet, params: KdeParams,
                     threshold: float) -> "FilterState":
        return cls(scorer=lambda vec: kde_similarity(vec, queries, params),
                   threshold=threshold, objective=queries.objective)

    @property
    def processed(self) -> int:
        return self.accepted + self.rejected


def calibrate_threshold(scores: Mapping[str, float],
                        labels: Mapping[str, bool]) -> float:
    """Threshold maximizing F1 on held-out scores (see metrics.best_f1)."""
    threshold, _, _, _ = best_f1(scores, labels)
    return threshold


def filter_step(state: FilterState, item_id: str,
                vector: np.ndarray) -> StreamDecision:
    """Score one item and decide; a score equal to the threshold accepts."""
    score = state._scorer(vector)
    accepted = score >= state.threshold
    if accepted:
        state.accepted += 1
    else:
        state.rejected += 1
    return StreamDecision(id=item_id, score=score, accepted=accepted,
                          objective=state.objective)


def run_stream(state: FilterState, items: Iterable[tuple[str, np.ndarray]]
               ) -> tuple[list[StreamDecision], list[tuple[str, str]]]:
    """Filter a stream of (id, vector) items.

    Item-level errors (bad dimensions, unusable data) are collected as
    (id, message) and logged; the stream keeps going.
    """
    decisions = []
    errors = []
    for item_id, vector in items:
        try:
            decisions.append(filter_step(state, item_id, vector))
        except RelfilterError as exc:
            log.warning("skipping item '%s': %s", item_id, exc)
            errors.append((item_id, str(exc)))
    return decisions, errors
