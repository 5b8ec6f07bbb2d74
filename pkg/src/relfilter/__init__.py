"""Content-based relevance ranking and stream filtering for disaster images."""

__version__ = "0.1.0"

from .data import (
    OBJECTIVES,
    DatasetManifest,
    ImageRecord,
    Split,
    keyword_match,
    load_keywords,
    load_manifest,
    save_manifest,
    split_dataset,
)
from .features import FeatureStore, load_store, preprocess_image, save_store
from .metrics import (
    PRCurve,
    RankedList,
    average_precision,
    best_f1,
    mean_ap,
    pr_curve,
)
from .retrieval import (
    DEFAULT_GAMMA,
    KdeParams,
    QuerySet,
    kde_similarity,
    rank_by_retrieval,
)
from .svm import (
    DEFAULT_C,
    LinearModel,
    TrainConfig,
    cross_validate_C,
    load_model,
    rank_by_classifier,
    save_model,
    svm_score,
    train_svm,
)

__all__ = [
    "__version__",
    "OBJECTIVES",
    "DatasetManifest",
    "ImageRecord",
    "Split",
    "keyword_match",
    "load_keywords",
    "load_manifest",
    "save_manifest",
    "split_dataset",
    "FeatureStore",
    "load_store",
    "preprocess_image",
    "save_store",
    "PRCurve",
    "RankedList",
    "average_precision",
    "best_f1",
    "mean_ap",
    "pr_curve",
    "DEFAULT_GAMMA",
    "KdeParams",
    "QuerySet",
    "kde_similarity",
    "rank_by_retrieval",
    "DEFAULT_C",
    "LinearModel",
    "TrainConfig",
    "cross_validate_C",
    "load_model",
    "rank_by_classifier",
    "save_model",
    "svm_score",
    "train_svm",
]
