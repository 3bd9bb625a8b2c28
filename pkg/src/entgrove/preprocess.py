"""Fit/apply data-quality transforms: imputation, categorical encoding and
min-max scaling to [0, 1].

Statistics come from the training table only; a fitted plan is immutable
and can be replayed on any table with the same feature columns.
"""

from __future__ import annotations

import statistics
from collections import Counter
from dataclasses import dataclass

from .dataset import CATEGORICAL, LABEL, NUMERIC, ColumnSchema, DatasetError, DatasetTable


class SchemaMismatchError(DatasetError):
    pass


@dataclass(frozen=True)
class NumericParams:
    min: float
    max: float
    impute_value: float

    def transform(self, x: float | None) -> float:
        if x is None:
            x = self.impute_value
        span = self.max - self.min
        if span == 0:
            return 0.0
        return min(1.0, max(0.0, (x - self.min) / span))


@dataclass(frozen=True)
class CategoricalParams:
    categories: tuple[str, ...]
    impute_token: str

    @property
    def index(self) -> dict[str, int]:
        return {c: i for i, c in enumerate(self.categories)}

    def transform(self, token: str | None, _index=None) -> int:
        index = _index if _index is not None else self.index
        if token is None or token not in index:
            token = self.impute_token
        return index[token]


@dataclass(frozen=True)
class PreprocessPlan:
    columns: tuple[tuple[str, str], ...]  # (name, kind) in feature order
    numeric: dict[str, NumericParams]
    categorical: dict[str, CategoricalParams]
    fitted_on_rows: int

    @property
    def feature_names(self) -> list[str]:
        return [n for n, _ in self.columns]

    @property
    def kinds(self) -> dict[str, str]:
        return dict(self.columns)

    def to_dict(self) -> dict:
        cols = []
        for name, kind in self.columns:
            if kind == NUMERIC:
                p = self.numeric[name]
                cols.append({
                    "name": name, "kind": kind,
                    "min": repr(p.min), "max": repr(p.max), "impute_value": repr(p.impute_value),
                })
            else:
                p = self.categorical[name]
                cols.append({
                    "name": name, "kind": kind,
                    "categories": list(p.categories), "impute_token": p.impute_token,
                })
        return {"columns": cols, "fitted_on_rows": self.fitted_on_rows}

    @classmethod
    def from_dict(cls, d: dict) -> "PreprocessPlan":
        columns, numeric, categorical = [], {}, {}
        for c in d["columns"]:
            columns.append((c["name"], c["kind"]))
            if c["kind"] == NUMERIC:
                numeric[c["name"]] = NumericParams(
                    float(c["min"]), float(c["max"]), float(c["impute_value"]))
            elif c["kind"] == CATEGORICAL:
                categorical[c["name"]] = CategoricalParams(tuple(c["categories"]), c["impute_token"])
            else:
                raise ValueError(f"unknown column kind {c['kind']!r}")
        return cls(tuple(columns), numeric, categorical, int(d["fitted_on_rows"]))


def fit_plan(train: DatasetTable) -> PreprocessPlan:
    if len(train) == 0:
        raise DatasetError("cannot fit a plan on an empty table")
    columns, numeric, categorical = [], {}, {}
    for col in train.feature_columns:
        values = [v for v in train.column(col.name) if v is not None]
        columns.append((col.name, col.kind))
        if col.kind == NUMERIC:
            if not values:
                raise DatasetError(f"numeric column {col.name!r} has no non-missing values")
            numeric[col.name] = NumericParams(
                float(min(values)), float(max(values)), float(statistics.median(values)))
        else:
            if not values:
                raise DatasetError(f"categorical column {col.name!r} has no non-missing values")
            cats = tuple(dict.fromkeys(values))
            counts = Counter(values)
            # max() keeps the first maximum: ties go to the earliest-seen category
            mode = max(cats, key=lambda c: counts[c])
            categorical[col.name] = CategoricalParams(cats, mode)
    return PreprocessPlan(tuple(columns), numeric, categorical, len(train))


def apply_plan(plan: PreprocessPlan, table: DatasetTable) -> DatasetTable:
    """Transform ``table`` into the plan's feature space.

    The output holds the plan's columns in plan order, followed by the label
    column if ``table`` has one. Extra feature columns are dropped.
    """
    src = []
    for name, kind in plan.columns:
        try:
            col = table.column_schema(name)
        except DatasetError:
            raise SchemaMismatchError(f"table is missing feature column {name!r}") from None
        if col.kind != kind:
            raise SchemaMismatchError(f"column {name!r} is {col.kind}, plan expects {kind}")
        src.append(table.column_index(name))

    transforms = []
    schema = []
    for name, kind in plan.columns:
        if kind == NUMERIC:
            transforms.append(plan.numeric[name].transform)
            schema.append(ColumnSchema(name, NUMERIC))
        else:
            params = plan.categorical[name]
            index = params.index
            transforms.append(lambda t, p=params, ix=index: p.transform(t, ix))
            schema.append(ColumnSchema(name, CATEGORICAL, params.categories))

    label = table.label_column
    label_idx = table.column_index(label) if label is not None else None
    if label is not None:
        schema.append(ColumnSchema(label, LABEL))

    rows = []
    for row in table.rows:
        out = [f(row[j]) for f, j in zip(transforms, src)]
        if label_idx is not None:
            out.append(row[label_idx])
        rows.append(tuple(out))
    return DatasetTable(tuple(schema), tuple(rows), table.source_path, table.dropped_row_count)
