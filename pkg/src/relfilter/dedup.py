"""Near-duplicate detection over a feature store.

Suspect pairs are every id pair whose cosine similarity reaches the
threshold; removal keeps one representative per connected component of
the pair graph (the lexicographically smallest id), which makes the
outcome deterministic and independent of pair order.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import kernels
from .errors import EmptyDatasetError, ParameterError, ValidationError
from .features import FeatureStore


@dataclass(frozen=True)
class DuplicatePair:
    """Unordered id pair (stored with id_a < id_b) and its similarity."""

    id_a: str
    id_b: str
    similarity: float

    def __post_init__(self):
        if not self.id_a < self.id_b:
            raise ValidationError(
                f"pair ids must satisfy id_a < id_b, got ({self.id_a}, {self.id_b})")


def find_near_duplicates(store: FeatureStore,
                         threshold: float) -> list[DuplicatePair]:
    """All pairs with cosine similarity >= threshold, most similar first.

    Ties break by (id_a, id_b) so the listing is deterministic.
    """
    if not 0.0 < threshold <= 1.0:
        raise ParameterError(f"threshold must be in (0,1], got {threshold}")
    if len(store) == 0:
        raise EmptyDatasetError("cannot search an empty store")
    ids = store.ids()
    ia, ja, sims = kernels.cosine_pairs(store.matrix64(), threshold)
    pairs = []
    for i, j, sim in zip(ia, ja, sims):
        a, b = ids[int(i)], ids[int(j)]
        if b < a:
            a, b = b, a
        pairs.append(DuplicatePair(id_a=a, id_b=b, similarity=float(sim)))
    pairs.sort(key=lambda p: (-p.similarity, p.id_a, p.id_b))
    return pairs


def deduplicate(store: FeatureStore, pairs: list[DuplicatePair]) -> set[str]:
    """Kept ids: one lexicographically smallest id per duplicate component.

    Singletons (ids in no pair) are always kept.  Unknown pair ids raise
    ValidationError.
    """
    parent: dict[str, str] = {item_id: item_id for item_id in store.ids()}

    def find(x: str) -> str:
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:  # path compression
            parent[x], x = root, parent[x]
        return root

    for pair in pairs:
        for item_id in (pair.id_a, pair.id_b):
            if item_id not in parent:
                raise ValidationError(f"pair references unknown id '{item_id}'")
        ra, rb = find(pair.id_a), find(pair.id_b)
        if ra != rb:
            # point the lexicographically larger root at the smaller one,
            # so every component root is its smallest member
            if rb < ra:
                ra, rb = rb, ra
            parent[rb] = ra

    return {item_id for item_id in parent if find(item_id) == item_id}
