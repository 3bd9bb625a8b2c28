"""Decision tree induction, prediction and reduced-error pruning.

Numeric features split in two (``value <= threshold`` goes left, C4.5
style); categorical features split multiway, one child per category of the
training domain (ID3 style). Categories absent at a node get a leaf that
carries the parent's class counts.

Ties between candidate splits are resolved by score, then by position in
the feature list, then by lower threshold, so induction is deterministic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence, Union

import numpy as np

from .dataset import CATEGORICAL, NUMERIC, ClassManifest, DatasetError, DatasetTable, class_manifest
from .features import TIE_EPS, categorical_split_score, numeric_split_matrix
from .preprocess import PreprocessPlan, SchemaMismatchError

CRITERIA = ("gain", "gain_ratio")


@dataclass(frozen=True)
class TrainConfig:
    criterion: str = "gain_ratio"
    max_depth: int | None = None
    min_samples_split: int = 2
    min_gain: float = 0.0
    prune: bool = False
    seed: int = 0

    def __post_init__(self):
        if self.criterion not in CRITERIA:
            raise ValueError(f"criterion must be one of {CRITERIA}, got {self.criterion!r}")
        if self.max_depth is not None and self.max_depth < 1:
            raise ValueError("max_depth must be a positive integer")
        if self.min_samples_split < 2:
            raise ValueError("min_samples_split must be >= 2")
        if not (self.min_gain >= 0 and math.isfinite(self.min_gain)):
            raise ValueError("min_gain must be a finite real >= 0")

    def to_dict(self) -> dict:
        return {
            "criterion": self.criterion,
            "max_depth": self.max_depth,
            "min_samples_split": self.min_samples_split,
            "min_gain": repr(self.min_gain),
            "prune": self.prune,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "TrainConfig":
        return cls(d["criterion"], d["max_depth"], d["min_samples_split"],
                   float(d["min_gain"]), d["prune"], d["seed"])


def _majority(class_counts: Mapping[str, int]) -> str:
    best = max(class_counts.values())
    return min(c for c, n in class_counts.items() if n == best)


@dataclass(frozen=True)
class Leaf:
    class_counts: dict[str, int]
    # training rows that reached this leaf; 0 for leaves standing in for an
    # empty partition, which inherit their parent's counts
    n_samples: int | None = None

    def __post_init__(self):
        if sum(self.class_counts.values()) <= 0:
            raise ValueError("a leaf needs a positive class count")

    @property
    def majority(self) -> str:
        return _majority(self.class_counts)

    @property
    def total(self) -> int:
        return sum(self.class_counts.values())

    @property
    def weight(self) -> int:
        return self.total if self.n_samples is None else self.n_samples


@dataclass(frozen=True)
class Internal:
    feature: str
    feature_index: int
    children: tuple["TreeNode", ...]
    class_counts: dict[str, int]
    threshold: float | None = None
    categories: tuple[tuple[int, ...], ...] | None = None

    def __post_init__(self):
        if not self.children:
            raise ValueError("an internal node needs children")
        if self.threshold is not None and len(self.children) != 2:
            raise ValueError("a threshold split has exactly two children")
        if self.categories is not None and len(self.categories) != len(self.children):
            raise ValueError("one category set per child")

    @property
    def majority(self) -> str:
        return _majority(self.class_counts)

    @property
    def total(self) -> int:
        return sum(self.class_counts.values())

    @property
    def weight(self) -> int:
        return self.total

    def heavier_child(self) -> int:
        totals = [c.weight for c in self.children]
        return totals.index(max(totals))

    def route(self, value) -> int:
        """Index of the child that ``value`` goes to."""
        if value is None or (isinstance(value, float) and math.isnan(value)):
            return self.heavier_child()
        if self.threshold is not None:
            return 0 if value <= self.threshold else 1
        for i, cats in enumerate(self.categories):
            if value in cats:
                return i
        return self.heavier_child()


TreeNode = Union[Leaf, Internal]


@dataclass(frozen=True)
class Split:
    feature_index: int
    feature: str
    score: float
    threshold: float | None = None


@dataclass(frozen=True)
class TrainedModel:
    root: TreeNode
    config: TrainConfig
    selected_features: tuple[str, ...]
    feature_kinds: tuple[str, ...]
    class_order: tuple[str, ...]
    training_manifest: ClassManifest
    plan: PreprocessPlan | None = None
    categorical_domains: dict[str, tuple[int, ...]] = field(default_factory=dict)
    provenance: dict = field(default_factory=dict)

    def matrix(self, table: DatasetTable) -> np.ndarray:
        """Feature matrix of an already-preprocessed table, in model order."""
        return table_matrix(table, self.selected_features, self.feature_kinds)

    def transform(self, table: DatasetTable) -> DatasetTable:
        """Replay the stored plan and projection on a raw table."""
        from .preprocess import apply_plan

        if self.plan is not None:
            table = apply_plan(self.plan, table)
        try:
            return table.select_features(self.selected_features)
        except DatasetError as e:
            raise SchemaMismatchError(str(e)) from None


def table_matrix(table: DatasetTable, features: Sequence[str], kinds: Sequence[str] | None = None) -> np.ndarray:
    X = np.empty((len(table), len(features)))
    for j, name in enumerate(features):
        try:
            col = table.column_schema(name)
        except DatasetError:
            raise SchemaMismatchError(f"table is missing feature column {name!r}") from None
        if kinds is not None and col.kind != kinds[j]:
            raise SchemaMismatchError(f"column {name!r} is {col.kind}, model expects {kinds[j]}")
        values = table.column(name)
        for i, v in enumerate(values):
            if v is None:
                X[i, j] = np.nan
            elif isinstance(v, str):
                raise DatasetError(f"column {name!r} holds raw category tokens; apply a plan first")
            else:
                X[i, j] = v
    return X


def _counts(y: np.ndarray, classes: Sequence[str]) -> dict[str, int]:
    binc = np.bincount(y, minlength=len(classes))
    return {classes[k]: int(c) for k, c in enumerate(binc) if c > 0}


def best_split(X, labels, kinds: Sequence[str], criterion: str = "gain_ratio",
               min_gain: float = 0.0, features: Sequence[str] | None = None) -> Split | None:
    """Best split of the rows ``X`` over every feature and, for numeric
    features, every midpoint threshold.

    Returns None when the labels are pure, when no feature separates the
    rows, or when ``min_gain > 0`` and the best score is ``<= min_gain``.
    With ``min_gain == 0`` a zero-score split is still returned for impure
    rows: this is what lets XOR-like targets be fitted at all.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[0] != len(labels):
        raise ValueError("X must be (n_rows, n_features) with one label per row")
    if criterion not in CRITERIA:
        raise ValueError(f"criterion must be one of {CRITERIA}")
    features = list(features) if features is not None else [f"f{j}" for j in range(X.shape[1])]
    classes = sorted(set(labels))
    index = {c: i for i, c in enumerate(classes)}
    y = np.fromiter((index[v] for v in labels), dtype=np.intp, count=len(labels))
    return _best_split(X, y, len(classes), kinds, criterion, min_gain, features)


def _best_split(X, y, n_classes, kinds, criterion, min_gain, features) -> Split | None:
    if X.shape[0] < 2 or np.all(y == y[0]):
        return None
    # candidates: (feature index, score, threshold); numeric ones are scored in one pass
    best_by_feature: dict[int, tuple[np.ndarray, np.ndarray | None]] = {}
    numeric = [j for j, k in enumerate(kinds) if k == NUMERIC]
    if numeric:
        thresholds, gains, split_info, valid, _ = numeric_split_matrix(X[:, numeric], y, n_classes)
        scores = gains if criterion == "gain" else gains / split_info
        scores = np.where(valid, scores, -np.inf)
        for c, j in enumerate(numeric):
            if valid[:, c].any():
                best_by_feature[j] = (scores[:, c], thresholds[:, c])
    for j, kind in enumerate(kinds):
        if kind == NUMERIC:
            continue
        col = X[:, j]
        if np.all(col == col[0]):
            continue
        gain, split_info, _, _ = categorical_split_score(col, y, n_classes)
        score = gain if criterion == "gain" else (gain / split_info if split_info > TIE_EPS else 0.0)
        best_by_feature[j] = (np.array([score]), None)
    if not best_by_feature:
        return None
    top = max(float(s.max()) for s, _ in best_by_feature.values())
    if min_gain > 0 and top <= min_gain:
        return None
    for j in sorted(best_by_feature):
        scores, thresholds = best_by_feature[j]
        hits = np.flatnonzero(scores >= top - TIE_EPS)
        if hits.size:
            k = int(hits[0])
            t = None if thresholds is None else float(thresholds[k])
            return Split(j, features[j], float(scores[k]), t)
    return None  # unreachable: the feature holding `top` always hits


def _domains_for(table: DatasetTable, features, kinds, X) -> dict[str, tuple[int, ...]]:
    out = {}
    for j, (name, kind) in enumerate(zip(features, kinds)):
        if kind != CATEGORICAL:
            continue
        cats = table.column_schema(name).observed_categories
        present = {int(v) for v in X[:, j]}
        if cats and all(0 <= v < len(cats) for v in present):
            out[name] = tuple(range(len(cats)))
        else:
            out[name] = tuple(sorted(present))
    return out


def induce_tree(train: DatasetTable, config: TrainConfig = TrainConfig(),
                plan: PreprocessPlan | None = None,
                selected_features: Sequence[str] | None = None,
                provenance: dict | None = None) -> TrainedModel:
    """Grow a tree on a preprocessed table.

    With no depth/size limits, ``min_gain == 0`` and no pruning, the tree
    reproduces every training label on a consistent dataset.
    """
    if len(train) == 0:
        raise DatasetError("cannot induce a tree from an empty table")
    features = tuple(selected_features) if selected_features is not None else tuple(train.feature_names)
    if not features:
        raise DatasetError("no features to split on")
    kinds = tuple(train.column_schema(f).kind for f in features)
    X = table_matrix(train, features)
    if np.isnan(X).any():
        raise DatasetError("training table has missing values; apply a preprocessing plan first")
    labels = train.labels()
    classes = tuple(sorted(set(labels)))
    index = {c: i for i, c in enumerate(classes)}
    y = np.fromiter((index[v] for v in labels), dtype=np.intp, count=len(labels))
    domains = _domains_for(train, features, kinds, X)

    def grow(rows: np.ndarray, depth: int) -> TreeNode:
        yy = y[rows]
        counts = _counts(yy, classes)
        if (len(counts) == 1
                or (config.max_depth is not None and depth >= config.max_depth)
                or len(rows) < config.min_samples_split):
            return Leaf(counts)
        split = _best_split(X[rows], yy, len(classes), kinds, config.criterion,
                            config.min_gain, features)
        if split is None:
            return Leaf(counts)
        col = X[rows, split.feature_index]
        if split.threshold is not None:
            mask = col <= split.threshold
            children = tuple(grow(rows[m], depth + 1) if m.any() else Leaf(counts, 0)
                             for m in (mask, ~mask))
            return Internal(split.feature, split.feature_index, children, counts, threshold=split.threshold)
        domain = domains[split.feature]
        children = []
        for v in domain:
            sub = rows[col == v]
            children.append(grow(sub, depth + 1) if sub.size else Leaf(counts, 0))
        return Internal(split.feature, split.feature_index, tuple(children), counts,
                        categories=tuple((v,) for v in domain))

    root = grow(np.arange(len(train)), 0)
    model = TrainedModel(root, config, features, kinds, classes, class_manifest(train), plan,
                         domains, dict(provenance or {}))
    return model


def _as_vector(model: TrainedModel, row) -> Sequence:
    if isinstance(row, Mapping):
        try:
            return [row[f] for f in model.selected_features]
        except KeyError as e:
            raise SchemaMismatchError(f"row is missing feature {e.args[0]!r}") from None
    if len(row) != len(model.selected_features):
        raise SchemaMismatchError(
            f"row has {len(row)} values, model expects {len(model.selected_features)}")
    return row


def find_leaf(root: TreeNode, x: Sequence) -> Leaf:
    node = root
    while isinstance(node, Internal):
        node = node.children[node.route(x[node.feature_index])]
    return node


def predict_proba(model: TrainedModel, row) -> np.ndarray:
    """Class distribution of the leaf ``row`` reaches, ordered by
    ``model.class_order``. ``row`` is a mapping from feature name to value or
    a sequence in ``model.selected_features`` order, already preprocessed."""
    leaf = find_leaf(model.root, _as_vector(model, row))
    total = leaf.total
    return np.array([leaf.class_counts.get(c, 0) / total for c in model.class_order])


def predict_label(model: TrainedModel, row) -> str:
    proba = predict_proba(model, row)
    # class_order is sorted, so argmax's first-hit rule picks the smallest class on ties
    return model.class_order[int(np.argmax(proba))]


def predict_many(model: TrainedModel, X: np.ndarray) -> tuple[list[str], np.ndarray]:
    """Labels and probability matrix for every row of ``X``."""
    X = np.asarray(X, dtype=float)
    probas = np.empty((X.shape[0], len(model.class_order)))
    labels = []
    for i, x in enumerate(X):
        leaf = find_leaf(model.root, x)
        total = leaf.total
        probas[i] = [leaf.class_counts.get(c, 0) / total for c in model.class_order]
        labels.append(leaf.majority)
    return labels, probas


def count_nodes(node: TreeNode) -> int:
    if isinstance(node, Leaf):
        return 1
    return 1 + sum(count_nodes(c) for c in node.children)


def tree_depth(node: TreeNode) -> int:
    if isinstance(node, Leaf):
        return 0
    return 1 + max(tree_depth(c) for c in node.children)


def accuracy_on(model: TrainedModel, X: np.ndarray, labels: Sequence[str]) -> float:
    predicted, _ = predict_many(model, X)
    return sum(p == t for p, t in zip(predicted, labels)) / len(labels)


def prune_reduced_error(model: TrainedModel, pruning_set: DatasetTable) -> TrainedModel:
    """Bottom-up reduced-error pruning against a held-out table.

    An internal node becomes a leaf of its training class counts whenever
    that does not add errors on the pruning rows reaching it (so subtrees no
    pruning row reaches are collapsed too). Accuracy on the pruning set can
    only stay equal or rise, and the node count never grows.
    """
    if len(pruning_set) == 0:
        raise DatasetError("pruning set is empty")
    X = model.matrix(pruning_set)
    truth = np.array(pruning_set.labels(), dtype=object)

    def prune(node: TreeNode, rows: np.ndarray) -> tuple[TreeNode, int]:
        if isinstance(node, Leaf):
            return node, int(np.sum(truth[rows] != node.majority))
        routes = np.array([node.route(v) for v in X[rows, node.feature_index]], dtype=np.intp)
        children, errors = [], 0
        for i, child in enumerate(node.children):
            new_child, e = prune(child, rows[routes == i])
            children.append(new_child)
            errors += e
        as_leaf = int(np.sum(truth[rows] != node.majority))
        if as_leaf <= errors:
            return Leaf(dict(node.class_counts)), as_leaf
        return Internal(node.feature, node.feature_index, tuple(children), node.class_counts,
                        node.threshold, node.categories), errors

    root, _ = prune(model.root, np.arange(len(pruning_set)))
    return TrainedModel(root, model.config, model.selected_features, model.feature_kinds,
                        model.class_order, model.training_manifest, model.plan,
                        model.categorical_domains, model.provenance)
