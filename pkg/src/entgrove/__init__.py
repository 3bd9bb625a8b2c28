"""Decision-tree intrusion and malware detection toolkit.

Pipeline: load and sanitize a CSV, fit a preprocessing plan on the training
portion, score features by information gain, grow an ID3/C4.5-style tree,
and evaluate it with one-vs-rest metrics, cross-entropy loss and per-sample
prediction time.
"""

from .dataset import (ClassManifest, ColumnSchema, DatasetError, DatasetTable, SplitResult,
                      class_manifest, load_csv, stratified_split)
from .features import (FeatureScore, SelectionPolicy, SelectionReport, entropy, gain_ratio,
                       information_gain, rank_and_select)
from .metrics import (ConfusionMatrix, MetricsReport, confusion, cross_entropy_loss, measure_apt,
                      metrics_from_confusion, render_report)
from .model_io import DigestMismatchError, UnsupportedVersionError, load_model, save_model
from .preprocess import PreprocessPlan, SchemaMismatchError, apply_plan, fit_plan
from .tree import (Internal, Leaf, TrainConfig, TrainedModel, best_split, induce_tree,
                   predict_label, predict_many, predict_proba, prune_reduced_error)

__version__ = "0.1.0"

__all__ = [
    "ClassManifest",
    "ColumnSchema",
    "ConfusionMatrix",
    "DatasetError",
    "DatasetTable",
    "DigestMismatchError",
    "FeatureScore",
    "Internal",
    "Leaf",
    "MetricsReport",
    "PreprocessPlan",
    "SchemaMismatchError",
    "SelectionPolicy",
    "SelectionReport",
    "SplitResult",
    "TrainConfig",
    "TrainedModel",
    "UnsupportedVersionError",
    "apply_plan",
    "best_split",
    "class_manifest",
    "confusion",
    "cross_entropy_loss",
    "entropy",
    "fit_plan",
    "gain_ratio",
    "induce_tree",
    "information_gain",
    "load_csv",
    "load_model",
    "measure_apt",
    "metrics_from_confusion",
    "predict_label",
    "predict_many",
    "predict_proba",
    "prune_reduced_error",
    "rank_and_select",
    "render_report",
    "save_model",
    "stratified_split",
]
