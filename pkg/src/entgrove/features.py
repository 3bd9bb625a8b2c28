"""Entropy-based feature scoring and filter selection.

All information quantities are in bits. Numeric features are scored as
binary splits at midpoints between adjacent distinct values; categorical
features as a multiway partition by value.
"""

from __future__ import annotations

import math
import re
import warnings
from collections import Counter
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .dataset import NUMERIC, DatasetError, DatasetTable

# scores closer than this are treated as equal when ranking or choosing splits
TIE_EPS = 1e-12


def entropy(labels: Sequence) -> float:
    """Shannon entropy of the label multiset, in bits."""
    if len(labels) == 0:
        raise ValueError("entropy of an empty label set is undefined")
    n = len(labels)
    h = 0.0
    for c in Counter(labels).values():
        p = c / n
        h -= p * math.log2(p)
    return max(h, 0.0)


def _row_entropy(counts: np.ndarray) -> np.ndarray:
    """Entropy of each row of a (m, K) count matrix; empty rows give 0.

    Uses H = log2(n) - sum(c log2 c) / n, which needs one log per cell.
    """
    counts = np.asarray(counts, dtype=float)
    n = np.maximum(counts.sum(axis=-1), 1.0)
    xlogx = (counts * np.log2(np.maximum(counts, 1.0))).sum(axis=-1)
    return np.maximum(np.log2(n) - xlogx / n, 0.0)


def encode_labels(labels: Sequence) -> tuple[np.ndarray, list]:
    classes = sorted(set(labels))
    index = {c: i for i, c in enumerate(classes)}
    return np.fromiter((index[y] for y in labels), dtype=np.intp, count=len(labels)), classes


def numeric_split_matrix(X: np.ndarray, y: np.ndarray, n_classes: int):
    """Score every candidate threshold of every column of ``X`` at once.

    Column ``j`` is sorted ascending; position ``i`` stands for the boundary
    between sorted rows ``i`` and ``i + 1`` and is a real candidate only when
    ``valid[i, j]`` (the two values differ). Returns
    ``(thresholds, gains, split_info, valid, parent_entropy)``, the first four
    shaped ``(n - 1, d)``.
    """
    X = np.asarray(X, dtype=float)
    n, d = X.shape
    order = np.argsort(X, axis=0, kind="stable")
    V = np.take_along_axis(X, order, axis=0)
    cum = np.cumsum(y[order][:, :, None] == np.arange(n_classes), axis=0)
    total = cum[-1, 0].astype(float)
    parent = float(_row_entropy(total)[()])

    lo, hi = V[:-1], V[1:]
    valid = lo < hi
    mid = lo / 2 + hi / 2
    thresholds = np.where((mid >= lo) & (mid < hi), mid, lo)
    lc = cum[:-1].astype(float)
    wl = (np.arange(1, n) / n)[:, None]
    wr = 1.0 - wl
    children = wl * _row_entropy(lc) + wr * _row_entropy(total - lc)
    gains = np.clip(parent - children, 0.0, parent)
    gains[gains < TIE_EPS] = 0.0
    split_info = np.broadcast_to(-(wl * np.log2(wl) + wr * np.log2(wr)), gains.shape)
    return thresholds, gains, split_info, valid, parent


def numeric_split_scores(values: np.ndarray, y: np.ndarray, n_classes: int):
    """Score every midpoint threshold of one numeric column.

    Returns ``(thresholds, gains, split_infos, parent_entropy)``; thresholds
    are ascending. Rows with value <= threshold go left.
    """
    values = np.asarray(values, dtype=float)[:, None]
    thresholds, gains, split_info, valid, parent = numeric_split_matrix(values, y, n_classes)
    keep = valid[:, 0]
    return thresholds[keep, 0], gains[keep, 0], split_info[keep, 0], parent


def categorical_split_score(values: Sequence, y: np.ndarray, n_classes: int):
    """Score the multiway partition by value.

    Returns ``(gain, split_info, parent_entropy, partition_sizes)``.
    """
    values = np.asarray(values)
    if values.dtype.kind == "f" and values.min() >= 0 and np.all(values == np.floor(values)):
        # already integer-coded (the preprocessed form): skip np.unique
        codes = values.astype(np.intp)
    else:
        codes = np.unique(values, return_inverse=True)[1].ravel()
    m = int(codes.max()) + 1
    table = np.bincount(codes * n_classes + y, minlength=m * n_classes).reshape(m, n_classes)
    table = table[table.any(axis=1)]
    n = len(codes)
    parent = float(_row_entropy(table.sum(axis=0))[()])
    sizes = table.sum(axis=1).astype(float)
    w = sizes / n
    gain = parent - float(w @ _row_entropy(table))
    gain = min(max(gain, 0.0), parent)
    if gain < TIE_EPS:
        gain = 0.0
    split_info = float(-(w * np.log2(w)).sum())
    return gain, max(split_info, 0.0), parent, sizes


def _ratio(gain: float, split_info: float) -> float:
    return gain / split_info if split_info > TIE_EPS else 0.0


@dataclass(frozen=True)
class FeatureScore:
    feature: str
    entropy_of_labels: float
    information_gain: float
    gain_ratio: float
    best_threshold: float | None = None
    split_info: float = 0.0

    def to_dict(self) -> dict:
        return {
            "feature": self.feature,
            "entropy_of_labels": self.entropy_of_labels,
            "information_gain": self.information_gain,
            "gain_ratio": self.gain_ratio,
            "split_info": self.split_info,
            "best_threshold": None if self.best_threshold is None else repr(self.best_threshold),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "FeatureScore":
        t = d.get("best_threshold")
        return cls(d["feature"], d["entropy_of_labels"], d["information_gain"], d["gain_ratio"],
                   None if t is None else float(t), d.get("split_info", 0.0))


def _check_column(column: Sequence, labels: Sequence):
    if len(column) != len(labels):
        raise ValueError(f"column has {len(column)} values but there are {len(labels)} labels")
    if len(column) == 0:
        raise ValueError("cannot score an empty column")
    for v in column:
        if v is None or (isinstance(v, float) and math.isnan(v)):
            raise ValueError("cannot score a column with missing values; impute first")


def information_gain(column: Sequence, labels: Sequence, kind: str, name: str = "") -> FeatureScore:
    """Score one feature against the labels.

    For numeric columns the reported gain is the best over all midpoint
    thresholds (lowest threshold on ties); ``gain_ratio`` and ``split_info``
    refer to that same threshold.
    """
    _check_column(column, labels)
    y, classes = encode_labels(labels)
    k = len(classes)
    if kind == NUMERIC:
        thresholds, gains, split_info, parent = numeric_split_scores(np.asarray(column, float), y, k)
        if thresholds.size == 0:
            return FeatureScore(name, parent, 0.0, 0.0, None, 0.0)
        best = int(np.flatnonzero(gains >= gains.max() - TIE_EPS)[0])
        g, si = float(gains[best]), float(split_info[best])
        return FeatureScore(name, parent, g, _ratio(g, si), float(thresholds[best]), si)
    gain, split_info, parent, _ = categorical_split_score(column, y, k)
    return FeatureScore(name, parent, gain, _ratio(gain, split_info), None, split_info)


def gain_ratio(column: Sequence, labels: Sequence, kind: str) -> float:
    """Information gain divided by split information; 0 when the split
    information is 0 (a constant feature)."""
    return information_gain(column, labels, kind).gain_ratio


@dataclass(frozen=True)
class SelectionPolicy:
    kind: str  # "top_k" or "min_gain"
    value: float

    @classmethod
    def parse(cls, text: str) -> "SelectionPolicy":
        m = re.fullmatch(r"\s*(top-k|top_k|min-gain|min_gain)\s*=\s*(\S+)\s*", text)
        if not m:
            raise ValueError(f"selection policy must be top-k=N or min-gain=T, got {text!r}")
        kind = m.group(1).replace("-", "_")
        if kind == "top_k":
            k = int(m.group(2))
            if k < 1:
                raise ValueError("top-k needs k >= 1")
            return cls("top_k", k)
        t = float(m.group(2))
        if not math.isfinite(t) or t < 0:
            raise ValueError("min-gain needs a finite threshold >= 0")
        return cls("min_gain", t)

    def __str__(self) -> str:
        if self.kind == "top_k":
            return f"top-k={int(self.value)}"
        return f"min-gain={self.value!r}"


DEFAULT_POLICY = SelectionPolicy("min_gain", 0.0)


@dataclass(frozen=True)
class SelectionReport:
    scores: tuple[FeatureScore, ...]
    selected: tuple[str, ...]
    policy: SelectionPolicy = DEFAULT_POLICY
    rank_by: str = "gain"
    warnings: tuple[str, ...] = field(default=(), compare=False)

    def to_dict(self) -> dict:
        return {
            "policy": str(self.policy),
            "rank_by": self.rank_by,
            "scores": [s.to_dict() for s in self.scores],
            "selected": list(self.selected),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SelectionReport":
        return cls(
            tuple(FeatureScore.from_dict(s) for s in d["scores"]),
            tuple(d["selected"]),
            SelectionPolicy.parse(d["policy"]),
            d.get("rank_by", "gain"),
        )


def _rank_key(score: FeatureScore, rank_by: str) -> float:
    if rank_by == "gain":
        return score.information_gain
    if rank_by == "gain_ratio":
        return score.gain_ratio
    raise ValueError(f"rank_by must be 'gain' or 'gain_ratio', got {rank_by!r}")


def rank_and_select(table: DatasetTable, policy: SelectionPolicy = DEFAULT_POLICY,
                    rank_by: str = "gain") -> SelectionReport:
    """Score every feature column and keep a subset according to ``policy``.

    ``min_gain(t)`` keeps features whose ranking score is strictly above
    ``t``; ``top_k(k)`` keeps the ``k`` best. Ranking is by descending score,
    ties broken by ascending feature name.
    """
    features = table.feature_columns
    if not features:
        raise DatasetError("table has no feature columns")
    labels = table.labels()
    scores = [information_gain(table.column(c.name), labels, c.kind, c.name) for c in features]
    scores.sort(key=lambda s: (-round(_rank_key(s, rank_by), 12), s.feature))

    notes = []
    if policy.kind == "top_k":
        k = int(policy.value)
        if k > len(scores):
            msg = f"top-k={k} exceeds the {len(scores)} available features; keeping all"
            warnings.warn(msg, stacklevel=2)
            notes.append(msg)
        selected = [s.feature for s in scores[:k]]
    elif policy.kind == "min_gain":
        selected = [s.feature for s in scores if _rank_key(s, rank_by) > policy.value]
    else:
        raise ValueError(f"unknown policy {policy.kind!r}")
    return SelectionReport(tuple(scores), tuple(selected), policy, rank_by, tuple(notes))
