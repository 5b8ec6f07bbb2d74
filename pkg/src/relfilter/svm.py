"""Binary linear SVM training, selection, persistence and scoring.

The solver minimizes the L1-hinge primal

    P(w) = 0.5 ||w||^2 + C * sum_i max(0, 1 - y_i w.x_i)

by coordinate descent on the box-constrained dual, with the bias handled
as an extra constant-1 feature component (so the bias is regularized; at
unit-norm features in 512+ dimensions the effect is negligible).  One
epoch visits every example in a seeded random order; training stops when
the largest projected-gradient magnitude in an epoch drops to the
configured tolerance, or at the epoch limit.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

import numpy as np

from . import kernels
from .errors import (
    DataError,
    DegenerateTrainingError,
    EmptyDatasetError,
    ParameterError,
    ShapeError,
    ValidationError,
)
from .features import FeatureStore
from .metrics import RankedList, average_precision

# regularization strengths selected by cross-validation, per feature space
DEFAULT_C = {
    "vgg16": 2.5,
    "resnet50": 0.5,
    "rmac": 0.005,
}

DEFAULT_C_GRID = (0.005, 0.5, 2.5)


@dataclass(frozen=True)
class TrainConfig:
    C: float = 1.0
    tolerance: float = 1e-4
    max_iterations: int = 1000
    seed: int = 0

    def __post_init__(self):
        if not self.C > 0:
            raise ParameterError(f"C must be positive, got {self.C}")
        if not self.tolerance > 0:
            raise ParameterError(f"tolerance must be positive, got {self.tolerance}")
        if self.max_iterations < 1:
            raise ParameterError("max_iterations must be >= 1")


@dataclass(frozen=True)
class LinearModel:
    """Trained weights plus the metadata needed to reuse them."""

    objective: str
    backend_tag: str
    weights: np.ndarray
    bias: float
    C: float
    train_objective_value: float
    # solver descent objective (the dual) after each epoch; in-memory only.
    # Coordinate descent lowers this monotonically; the primal may wobble
    # between epochs, so only its final value is reported above.
    objective_history: tuple[float, ...] | None = field(default=None, compare=False)
    # final dual variables in training order, for feasibility checks
    dual_coefficients: tuple[float, ...] | None = field(default=None, compare=False)

    @property
    def dim(self) -> int:
        return self.weights.shape[0]


def primal_objective(w_aug: np.ndarray, x_aug: np.ndarray, y: np.ndarray,
                     c: float) -> float:
    margins = 1.0 - y * (x_aug @ w_aug)
    hinge = np.maximum(margins, 0.0).sum()
    return 0.5 * float(w_aug @ w_aug) + c * float(hinge)


def dual_objective(w_aug: np.ndarray, alpha: np.ndarray) -> float:
    """The box program the solver descends: 0.5 ||w(a)||^2 - sum(a)."""
    return 0.5 * float(w_aug @ w_aug) - float(alpha.sum())


def _training_arrays(features: FeatureStore, labels: Mapping[str, int]):
    """Assemble (ids, augmented X, y) in store order restricted to labels."""
    ids = [i for i in features.ids() if i in labels]
    missing = set(labels) - set(ids)
    if missing:
        raise ValidationError(
            f"labeled ids missing from the store: {sorted(missing)[:5]}")
    if not ids:
        raise EmptyDatasetError("no labeled examples")
    y = np.empty(len(ids), dtype=np.float64)
    for row, item_id in enumerate(ids):
        val = labels[item_id]
        if val not in (1, -1):
            raise ValidationError(
                f"label for '{item_id}' must be +1 or -1, got {val!r}")
        y[row] = float(val)
    if np.all(y > 0) or np.all(y < 0):
        raise DegenerateTrainingError("training data contains only one class")
    x = np.stack([features.get(i) for i in ids]).astype(np.float64)
    if not np.all(np.isfinite(x)):
        raise DataError("training features contain NaN or infinity")
    x_aug = np.ascontiguousarray(np.hstack([x, np.ones((x.shape[0], 1))]))
    return ids, x_aug, y


def train_svm(features: FeatureStore, labels: Mapping[str, int],
              config: TrainConfig, objective: str = "") -> LinearModel:
    """Train on the labeled subset of the store; labels map id -> +1/-1."""
    _, x_aug, y = _training_arrays(features, labels)
    n, d_aug = x_aug.shape
    qii = np.einsum("ij,ij->i", x_aug, x_aug)
    alpha = np.zeros(n, dtype=np.float64)
    w = np.zeros(d_aug, dtype=np.float64)
    rng = np.random.default_rng(config.seed)

    history = []
    for _ in range(config.max_iterations):
        order = rng.permutation(n).astype(np.int64)
        max_pg = kernels.svm_epoch(x_aug, y, alpha, w, config.C, qii, order)
        history.append(dual_objective(w, alpha))
        if max_pg <= config.tolerance:
            break

    return LinearModel(
        objective=objective,
        backend_tag=features.backend_tag,
        weights=w[:-1].copy(),
        bias=float(w[-1]),
        C=config.C,
        train_objective_value=primal_objective(w, x_aug, y, config.C),
        objective_history=tuple(history),
        dual_coefficients=tuple(alpha.tolist()),
    )


def svm_score(model: LinearModel, x: np.ndarray) -> float:
    """Raw decision value w.x + b (no clamping)."""
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    if x.shape[0] != model.dim:
        raise ShapeError(f"vector dim {x.shape[0]} does not match model dim "
                         f"{model.dim}")
    return float(model.weights @ x + model.bias)


def score_store(model: LinearModel, store: FeatureStore) -> dict[str, float]:
    """Decision values for every store item, keyed by id.

    Items are scored one at a time through svm_score: a matrix-vector
    product can round individual rows differently than a single dot
    product does, and a threshold calibrated on these values must
    transfer bit-exactly to consumers that score items one by one.
    """
    if store.dim != model.dim:
        raise ShapeError(f"store dim {store.dim} does not match model dim "
                         f"{model.dim}")
    return {item_id: svm_score(model, store.get(item_id))
            for item_id in store.ids()}


def rank_by_classifier(store: FeatureStore, model: LinearModel) -> RankedList:
    """Rank every store item by descending decision value, ties by id."""
    if len(store) == 0:
        raise EmptyDatasetError("cannot rank an empty store")
    return RankedList.from_scores(score_store(model, store))


def _stratified_folds(pos_ids: list[str], neg_ids: list[str], k: int,
                      rng: np.random.Generator) -> list[set[str]]:
    if len(pos_ids) < k or len(neg_ids) < k:
        raise ValidationError(
            f"stratified {k}-fold split needs >= {k} examples per class "
            f"(have {len(pos_ids)} positive, {len(neg_ids)} negative)")
    pos = sorted(pos_ids)
    neg = sorted(neg_ids)
    rng.shuffle(pos)
    rng.shuffle(neg)
    return [set(pos[j::k]) | set(neg[j::k]) for j in range(k)]


def cross_validate_C(features: FeatureStore, labels: Mapping[str, int],
                     grid=DEFAULT_C_GRID, k: int = 5, seed: int = 0,
                     base_config: TrainConfig | None = None) -> float:
    """Pick the grid value with the best mean validation AP over k folds.

    Folds are stratified by class so every fold holds both labels.  Ties
    break toward the smaller C (stronger regularization).
    """
    grid = list(grid)
    if not grid:
        raise ParameterError("C grid must be nonempty")
    for c in grid:
        if not c > 0:
            raise ParameterError(f"C grid values must be positive, got {c}")
    pos_ids = [i for i, v in labels.items() if v == 1]
    neg_ids = [i for i, v in labels.items() if v == -1]
    rng = np.random.default_rng(seed)
    folds = _stratified_folds(pos_ids, neg_ids, k, rng)

    best_c = None
    best_mean = -1.0
    for c in sorted(grid):
        fold_aps = []
        for fold in folds:
            train_labels = {i: v for i, v in labels.items() if i not in fold}
            val_ids = [i for i in labels if i in fold]
            cfg = TrainConfig(
                C=c,
                tolerance=base_config.tolerance if base_config else 1e-4,
                max_iterations=base_config.max_iterations if base_config else 1000,
                seed=seed,
            )
            model = train_svm(features, train_labels, cfg)
            scores = {i: svm_score(model, features.get(i)) for i in val_ids}
            ranking = RankedList.from_scores(scores)
            relevant = {i for i in val_ids if labels[i] == 1}
            fold_aps.append(average_precision(ranking, relevant))
        mean_ap_c = sum(fold_aps) / len(fold_aps)
        # strict comparison on an ascending grid keeps the smallest maximizer
        if mean_ap_c > best_mean:
            best_mean = mean_ap_c
            best_c = c
    return best_c


def save_model(model: LinearModel, path: str | Path,
               extra_meta: dict | None = None) -> None:
    payload = {
        "objective": model.objective,
        "backend_tag": model.backend_tag,
        "dim": model.dim,
        "weights": [float(v) for v in model.weights],
        "bias": model.bias,
        "C": model.C,
        "train_objective_value": model.train_objective_value,
    }
    if extra_meta:
        payload["_meta"] = extra_meta
    Path(path).write_text(json.dumps(payload, sort_keys=True) + "\n",
                          encoding="utf-8")


def load_model(path: str | Path) -> LinearModel:
    try:
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ValidationError(f"model file is not valid JSON: {exc}") from exc
    try:
        weights = np.asarray(payload["weights"], dtype=np.float64)
        model = LinearModel(
            objective=payload["objective"],
            backend_tag=payload["backend_tag"],
            weights=weights,
            bias=float(payload["bias"]),
            C=float(payload["C"]),
            train_objective_value=float(payload["train_objective_value"]),
        )
    except KeyError as exc:
        raise ValidationError(f"model file lacks field {exc}") from exc
    if payload.get("dim") != model.dim:
        raise ValidationError(
            f"model dim field {payload.get('dim')} does not match "
            f"{model.dim} weights")
    if not np.all(np.isfinite(model.weights)):
        raise DataError("model weights contain non-finite values")
    return model
