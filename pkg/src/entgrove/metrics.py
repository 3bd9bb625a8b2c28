"""Detection metrics: confusion matrix, one-vs-rest rates, cross-entropy
loss, average prediction time and the report table."""

from __future__ import annotations

import json
import time
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from .tree import TrainedModel, find_leaf

# Published comparison rows, shown for context only. Columns:
# specificity %, F1 %, accuracy %, loss, APT ms.
REFERENCE_ROWS = {
    "ResNet18 (reference)": (94.14, 96.39, 95.03, 0.181, 146),
    "Decision tree (reference)": (98.69, 98.76, 97.67, 0.086, 97),
    "DenseNet161 (reference)": (97.97, 94.67, 96.66, 0.156, 480),
}

# Deep-baseline training hyperparameters from the same comparison; they have
# no meaning for tree induction and are carried as inert report metadata.
REFERENCE_HYPERPARAMETERS = {
    "batch_size": 64,
    "epochs": 25,
    "learning_rate": 1e-3,
    "optimizer": "Adam",
    "loss_function": "cross-entropy",
}

PROBA_CLIP = 1e-12


@dataclass(frozen=True)
class ConfusionMatrix:
    class_order: tuple[str, ...]
    counts: np.ndarray  # counts[i, j]: true class i predicted as class j

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    @property
    def correct(self) -> int:
        return int(np.trace(self.counts))

    def __eq__(self, other):
        return (isinstance(other, ConfusionMatrix) and self.class_order == other.class_order
                and np.array_equal(self.counts, other.counts))

    def to_dict(self) -> dict:
        return {"class_order": list(self.class_order), "counts": self.counts.tolist()}


def confusion(truth: Sequence[str], predicted: Sequence[str], class_order: Sequence[str]) -> ConfusionMatrix:
    if len(truth) != len(predicted):
        raise ValueError(f"{len(truth)} true labels but {len(predicted)} predictions")
    if len(truth) == 0:
        raise ValueError("no rows to evaluate")
    index = {c: i for i, c in enumerate(class_order)}
    counts = np.zeros((len(class_order), len(class_order)), dtype=np.int64)
    for t, p in zip(truth, predicted):
        try:
            counts[index[t], index[p]] += 1
        except KeyError as e:
            raise ValueError(f"class {e.args[0]!r} not in class_order") from None
    return ConfusionMatrix(tuple(class_order), counts)


@dataclass(frozen=True)
class ClassRates:
    precision: float
    recall: float
    specificity: float
    f1: float


def _div(a: float, b: float) -> float:
    return a / b if b else 0.0


def _f1(p: float, r: float) -> float:
    return _div(2 * p * r, p + r)


@dataclass(frozen=True)
class MetricsReport:
    accuracy: float
    per_class: dict[str, ClassRates]
    macro: ClassRates
    micro: ClassRates
    loss: float = 0.0
    apt_ms: float = 0.0
    n_rows: int = 0
    confusion: dict = field(default_factory=dict)
    model_meta: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["averaging"] = "macro (unweighted one-vs-rest mean); micro also listed"
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "MetricsReport":
        return cls(
            accuracy=d["accuracy"],
            per_class={k: ClassRates(**v) for k, v in d["per_class"].items()},
            macro=ClassRates(**d["macro"]),
            micro=ClassRates(**d["micro"]),
            loss=d["loss"],
            apt_ms=d["apt_ms"],
            n_rows=d["n_rows"],
            confusion=d["confusion"],
            model_meta=d["model_meta"],
        )

    @classmethod
    def from_json(cls, text: str) -> "MetricsReport":
        return cls.from_dict(json.loads(text))


def metrics_from_confusion(cm: ConfusionMatrix, loss: float = 0.0, apt_ms: float = 0.0,
                           model_meta: dict | None = None) -> MetricsReport:
    """One-vs-rest precision, recall, specificity and F1 per class, their
    unweighted (macro) mean, and pooled (micro) rates. 0/0 counts as 0."""
    c = cm.counts.astype(np.int64)
    total = int(c.sum())
    if total <= 0:
        raise ValueError("confusion matrix is empty")
    tp = np.diag(c)
    fp = c.sum(axis=0) - tp
    fn = c.sum(axis=1) - tp
    tn = total - tp - fp - fn

    per_class = {}
    for k, name in enumerate(cm.class_order):
        p = _div(tp[k], tp[k] + fp[k])
        r = _div(tp[k], tp[k] + fn[k])
        s = _div(tn[k], tn[k] + fp[k])
        per_class[name] = ClassRates(float(p), float(r), float(s), float(_f1(p, r)))
    rates = list(per_class.values())
    macro = ClassRates(*(float(np.mean([getattr(x, f) for x in rates]))
                         for f in ("precision", "recall", "specificity", "f1")))
    TP, FP, FN, TN = (int(a.sum()) for a in (tp, fp, fn, tn))
    mp, mr = _div(TP, TP + FP), _div(TP, TP + FN)
    micro = ClassRates(mp, mr, _div(TN, TN + FP), _f1(mp, mr))
    return MetricsReport(
        accuracy=int(tp.sum()) / total,
        per_class=per_class,
        macro=macro,
        micro=micro,
        loss=float(loss),
        apt_ms=float(apt_ms),
        n_rows=total,
        confusion=cm.to_dict(),
        model_meta=dict(model_meta or {}),
    )


def cross_entropy_loss(probas, truth: Sequence[str], class_order: Sequence[str]) -> float:
    """Mean of ``-ln(max(p_true, 1e-12))`` over rows."""
    probas = np.asarray(probas, dtype=float)
    if probas.ndim != 2 or probas.shape[1] != len(class_order):
        raise ValueError("probability vectors do not match class_order")
    if probas.shape[0] != len(truth):
        raise ValueError(f"{probas.shape[0]} probability rows but {len(truth)} labels")
    if probas.shape[0] == 0:
        raise ValueError("no rows")
    if np.any(np.abs(probas.sum(axis=1) - 1.0) > 1e-9):
        raise ValueError("each probability vector must sum to 1")
    index = {c: i for i, c in enumerate(class_order)}
    try:
        cols = [index[t] for t in truth]
    except KeyError as e:
        raise ValueError(f"class {e.args[0]!r} not in class_order") from None
    p_true = probas[np.arange(len(cols)), cols]
    return float(np.mean(-np.log(np.maximum(p_true, PROBA_CLIP))))


def measure_apt(model: TrainedModel, rows, repetitions: int = 1) -> float:
    """Average wall-clock milliseconds to classify one row.

    One untimed warm-up pass, then ``repetitions`` timed passes over all
    ``rows`` (a preprocessed feature matrix), each row classified on its own.
    """
    X = np.asarray(rows, dtype=float)
    if X.ndim != 2 or X.shape[0] == 0:
        raise ValueError("need a non-empty 2-D array of rows")
    if repetitions < 1:
        raise ValueError("repetitions must be >= 1")
    root = model.root
    samples = list(X)
    for x in samples:
        find_leaf(root, x).majority
    start = time.perf_counter()
    for _ in range(repetitions):
        for x in samples:
            find_leaf(root, x).majority
    elapsed = time.perf_counter() - start
    return elapsed * 1000.0 / (repetitions * len(samples))


HEADER = ("Model", "Spec (%)", "F1-Score (%)", "Acc (%)", "Loss", "APT (ms)")


def _fmt_apt(apt) -> str:
    if isinstance(apt, int) or (isinstance(apt, float) and apt.is_integer() and apt >= 1):
        return str(int(apt))
    return f"{apt:.4f}"


def format_row(spec_pct: float, f1_pct: float, acc_pct: float, loss: float, apt_ms) -> str:
    return f"{spec_pct:.2f} | {f1_pct:.2f} | {acc_pct:.2f} | {loss:.3f} | {_fmt_apt(apt_ms)}"


def render_report(report: MetricsReport, reference: bool = False, name: str = "This model") -> tuple[str, str]:
    """Text table in the layout of the published comparison, plus the JSON.

    Specificity and F1 are macro averages. With ``reference=True`` the
    published rows are appended, labeled as such.
    """
    rows = [(name, format_row(100 * report.macro.specificity, 100 * report.macro.f1,
                              100 * report.accuracy, report.loss, report.apt_ms))]
    if reference:
        rows += [(label, format_row(*vals)) for label, vals in REFERENCE_ROWS.items()]
    width = max(len(HEADER[0]), *(len(r[0]) for r in rows))
    lines = [f"{HEADER[0]:<{width}} | " + " | ".join(HEADER[1:])]
    lines.append("-" * len(lines[0]))
    lines += [f"{label:<{width}} | {cells}" for label, cells in rows]
    lines.append("Spec and F1 are macro averages over classes.")
    return "\n".join(lines) + "\n", report.to_json()
