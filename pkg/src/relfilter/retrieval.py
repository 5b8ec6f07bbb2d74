"""Retrieval-based relevance scoring against a fixed ideal-query set.

The similarity of an item x to a query set Q is the kernel density
estimate

    sim(x, Q) = (1/|Q|) * sum_{q in Q} exp(-gamma * ||x - q||^2)

which lies in (0, 1] and reaches 1 exactly when x coincides with every
query.  Scores are computed in double precision so exp(-4*gamma) does not
underflow at the default bandwidths.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import EmptyDatasetError, ParameterError, ShapeError
from .features import FeatureStore
from .metrics import RankedList

# bandwidths chosen on the training data, keyed by feature space
DEFAULT_GAMMA = {
    "vgg16": 10.0,
    "resnet50": 5.0,
    "rmac": 5.0,
}


@dataclass(frozen=True)
class KdeParams:
    """Inverse squared-distance bandwidth of the Gaussian kernel."""

    gamma: float

    def __post_init__(self):
        if not self.gamma > 0:
            raise ParameterError(f"gamma must be positive, got {self.gamma}")


@dataclass(frozen=True)
class QuerySet:
    """Ideal-query vectors for one objective.

    ``ids`` carries the query image ids when they are known, so rankings
    can exclude the queries themselves from the scored population.
    """

    objective: str
    vectors: np.ndarray  # (m, d) float64
    ids: tuple[str, ...] = field(default_factory=tuple)

    def __post_init__(self):
        vecs = np.atleast_2d(np.asarray(self.vectors, dtype=np.float64))
        if vecs.shape[0] < 1:
            raise ParameterError("query set must contain at least one vector")
        if self.ids is None:
            object.__setattr__(self, "ids", ())
        elif self.ids and len(self.ids) != vecs.shape[0]:
            raise ParameterError("query id count does not match vector count")
        object.__setattr__(self, "vectors", vecs)

    @property
    def size(self) -> int:
        return self.vectors.shape[0]

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    @classmethod
    def from_store(cls, store: FeatureStore, objective: str,
                   ids: list[str] | None = None) -> "QuerySet":
        """Build a query set from store vectors; all ids when none given."""
        chosen = list(store.ids()) if ids is None else list(ids)
        vecs = np.stack([store.get(i) for i in chosen]).astype(np.float64)
        return cls(objective=objective, vectors=vecs, ids=tuple(chosen))


def kde_similarity(x: np.ndarray, queries: QuerySet, params: KdeParams) -> float:
    """Score a single vector against the query set."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1 or x.shape[0] != queries.dim:
        raise ShapeError(
            f"vector dim {x.shape} does not match query dim {queries.dim}")
    return float(kernels.kde_scores(x[None, :], queries.vectors, params.gamma)[0])


def kde_similarity_batch(x: np.ndarray, queries: QuerySet,
                         params: KdeParams) -> np.ndarray:
    """Score an (n, d) matrix of vectors; returns (n,) float64.

    Rows are scored one at a time through kde_similarity: a BLAS matmul
    over the whole matrix can round individual dot products differently
    than a single-row call does, and a threshold calibrated on batch
    scores must transfer bit-exactly to per-item consumers.
    """
    x = np.atleast_2d(np.asarray(x, dtype=np.float64))
    if x.shape[1] != queries.dim:
        raise ShapeError(
            f"matrix dim {x.shape[1]} does not match query dim {queries.dim}")
    return np.array([kde_similarity(row, queries, params) for row in x],
                    dtype=np.float64)


def rank_by_retrieval(store: FeatureStore, queries: QuerySet,
                      params: KdeParams) -> RankedList:
    """Rank all non-query store items by descending KDE similarity.

    Ties break by ascending id, so the ordering is a deterministic
    function of the store contents.
    """
    if len(store) == 0:
        raise EmptyDatasetError("cannot rank an empty store")
    if store.dim != queries.dim:
        raise ShapeError(
            f"store dim {store.dim} does not match query dim {queries.dim}")
    query_ids = set(queries.ids)
    ids = [i for i in store.ids() if i not in query_ids]
    if not ids:
        raise EmptyDatasetError("store contains only query vectors")
    scores = {i: kde_similarity(store.get(i), queries, params) for i in ids}
    return RankedList.from_scores(scores)
