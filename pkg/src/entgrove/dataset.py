"""Tabular ingestion: CSV loading, schema inference, class manifests and
seeded stratified splits."""

from __future__ import annotations

import csv
import json
import math
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .rng import SplitMix64

MISSING_TOKENS = frozenset({"", "?"})

NUMERIC = "numeric"
CATEGORICAL = "categorical"
LABEL = "label"


class DatasetError(ValueError):
    """Raised when a table cannot be loaded or violates its schema."""


@dataclass(frozen=True)
class ColumnSchema:
    name: str
    kind: str
    observed_categories: tuple[str, ...] = ()
    missing_count: int = 0


@dataclass(frozen=True)
class DatasetTable:
    """Immutable table. Cells are floats (numeric), str tokens (raw categories),
    ints (encoded categories), or None (missing)."""

    schema: tuple[ColumnSchema, ...]
    rows: tuple[tuple, ...]
    source_path: str = ""
    dropped_row_count: int = 0

    def __post_init__(self):
        width = len(self.schema)
        for row in self.rows:
            if len(row) != width:
                raise DatasetError(f"row has {len(row)} cells, schema has {width}")
        labels = [c for c in self.schema if c.kind == LABEL]
        if len(labels) > 1:
            raise DatasetError("more than one label column")

    def __len__(self) -> int:
        return len(self.rows)

    @property
    def column_names(self) -> list[str]:
        return [c.name for c in self.schema]

    @property
    def label_column(self) -> str | None:
        for c in self.schema:
            if c.kind == LABEL:
                return c.name
        return None

    @property
    def feature_columns(self) -> list[ColumnSchema]:
        return [c for c in self.schema if c.kind != LABEL]

    @property
    def feature_names(self) -> list[str]:
        return [c.name for c in self.feature_columns]

    def column_index(self, name: str) -> int:
        for i, c in enumerate(self.schema):
            if c.name == name:
                return i
        raise DatasetError(f"no column named {name!r}")

    def column_schema(self, name: str) -> ColumnSchema:
        return self.schema[self.column_index(name)]

    def column(self, name: str) -> list:
        i = self.column_index(name)
        return [row[i] for row in self.rows]

    def labels(self) -> list[str]:
        name = self.label_column
        if name is None:
            raise DatasetError("table has no label column")
        return self.column(name)

    def subset(self, indices: Iterable[int]) -> "DatasetTable":
        rows = tuple(self.rows[i] for i in indices)
        return DatasetTable(self.schema, rows, self.source_path, 0)

    def select_features(self, names: Sequence[str]) -> "DatasetTable":
        """Project onto ``names`` (in that order) plus the label column, if any."""
        keep = [self.column_index(n) for n in names]
        if self.label_column is not None:
            keep.append(self.column_index(self.label_column))
        schema = tuple(self.schema[i] for i in keep)
        rows = tuple(tuple(row[i] for i in keep) for row in self.rows)
        return DatasetTable(schema, rows, self.source_path, self.dropped_row_count)


@dataclass(frozen=True)
class ClassManifest:
    entries: tuple[tuple[str, int], ...]
    total: int

    def to_dict(self) -> dict:
        return {
            "classes": [{"name": n, "count": c} for n, c in self.entries],
            "total": self.total,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ClassManifest":
        entries = tuple((e["name"], int(e["count"])) for e in d["classes"])
        return cls(entries, int(d["total"]))

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


@dataclass(frozen=True)
class SplitResult:
    train_indices: tuple[int, ...]
    validation_indices: tuple[int, ...]
    seed: int
    train_fraction: float

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "train_fraction": self.train_fraction,
            "train_indices": list(self.train_indices),
            "validation_indices": list(self.validation_indices),
        }


def _is_missing(token: str) -> bool:
    return token.strip() in MISSING_TOKENS


def _parse_real(token: str) -> float | None:
    try:
        x = float(token)
    except ValueError:
        return None
    return x if math.isfinite(x) else None


def load_csv(
    path: str | Path,
    label_column: str | None,
    delimiter: str = ",",
    kinds: dict[str, str] | None = None,
) -> DatasetTable:
    """Load a delimited file with a header row into a :class:`DatasetTable`.

    A column is numeric iff every non-missing cell parses as a finite real;
    otherwise it is categorical. ``kinds`` forces the kind of named columns,
    which is how a fitted model replays its training schema on new files.

    Rows with the wrong number of cells, or a missing label, are dropped and
    counted in ``dropped_row_count``. Blank lines are ignored entirely.

    ``label_column=None`` loads an unlabeled table (used for prediction).
    """
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"no such file: {path}")
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh, delimiter=delimiter)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise DatasetError(f"{path}: empty file") from None
        raw = [r for r in reader if r and not (len(r) == 1 and not r[0].strip())]

    if len(set(header)) != len(header):
        raise DatasetError(f"{path}: duplicate column names in header")
    label_idx = None
    if label_column is not None:
        if label_column not in header:
            raise DatasetError(f"{path}: header has no label column {label_column!r}")
        label_idx = header.index(label_column)

    width = len(header)
    kept = []
    for r in raw:
        if len(r) != width:
            continue
        if label_idx is not None and _is_missing(r[label_idx]):
            continue
        kept.append([c.strip() for c in r])
    dropped = len(raw) - len(kept)
    if not kept:
        raise DatasetError(f"{path}: zero rows retained ({dropped} dropped)")

    kinds = kinds or {}
    schema = []
    columns = []
    for j, name in enumerate(header):
        cells = [r[j] for r in kept]
        if j == label_idx:
            schema.append(ColumnSchema(name, LABEL))
            columns.append(cells)
            continue
        present = [c for c in cells if not _is_missing(c)]
        missing = len(cells) - len(present)
        kind = kinds.get(name)
        if kind is None:
            kind = NUMERIC if all(_parse_real(c) is not None for c in present) else CATEGORICAL
        if kind == NUMERIC:
            values = []
            for c in cells:
                if _is_missing(c):
                    values.append(None)
                    continue
                x = _parse_real(c)
                if x is None:
                    raise DatasetError(f"{path}: column {name!r} expected numeric, got {c!r}")
                values.append(x)
            schema.append(ColumnSchema(name, NUMERIC, (), missing))
        elif kind == CATEGORICAL:
            values = [None if _is_missing(c) else c for c in cells]
            seen = tuple(dict.fromkeys(v for v in values if v is not None))
            schema.append(ColumnSchema(name, CATEGORICAL, seen, missing))
        else:
            raise DatasetError(f"unknown column kind {kind!r} for {name!r}")
        columns.append(values)

    rows = tuple(zip(*columns))
    return DatasetTable(tuple(schema), rows, str(path), dropped)


def class_manifest(table: DatasetTable) -> ClassManifest:
    if len(table) == 0:
        raise DatasetError("empty table")
    counts = Counter(table.labels())
    entries = tuple(sorted(counts.items()))
    return ClassManifest(entries, sum(counts.values()))


def _train_count(n: int, fraction: float) -> int:
    # epsilon guards products like 0.29 * 100 = 28.999999999999996
    return int(math.floor(n * fraction + 1e-9))


def stratified_split(table: DatasetTable, train_fraction: float = 0.75, seed: int = 0) -> SplitResult:
    """Per-class seeded Fisher-Yates shuffle; the first ``floor(n_c * f)``
    rows of each class go to train, the remainder to validation.

    Classes are visited in sorted name order and share one SplitMix64 stream,
    so the result is a pure function of (labels, fraction, seed).
    """
    if not 0.0 < train_fraction < 1.0:
        raise DatasetError(f"train_fraction must be in (0, 1), got {train_fraction}")
    by_class: dict[str, list[int]] = {}
    for i, y in enumerate(table.labels()):
        by_class.setdefault(y, []).append(i)
    small = sorted(c for c, idx in by_class.items() if len(idx) < 2)
    if small:
        raise DatasetError(f"classes with fewer than 2 rows cannot be split: {small}")

    rng = SplitMix64(seed)
    train, valid = [], []
    for cls in sorted(by_class):
        idx = by_class[cls]
        rng.shuffle(idx)
        k = _train_count(len(idx), train_fraction)
        train.extend(idx[:k])
        valid.extend(idx[k:])
    return SplitResult(tuple(sorted(train)), tuple(sorted(valid)), seed, train_fraction)
