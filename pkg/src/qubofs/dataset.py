"""Typed in-memory datasets: CSV ingest, splitting, and k-fold plans.

A :class:`Dataset` is immutable after construction and safe to share across
threads. Columns are float64 throughout; binary columns hold 0/1, nominal
columns hold category indices, and the original category labels are kept so
round-tripping through CSV is lossless.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import numpy as np

from .errors import (
    BadFractionsError,
    ClassTooSmallError,
    DatasetError,
    EmptyDataError,
    MissingColumnError,
    RaggedRowError,
    TooFewRecordsError,
    UnparseableCellError,
)

#: Columns with at most this many distinct integral (or textual) values are
#: inferred as nominal. Override per column via a schema if needed.
DEFAULT_MAX_CATEGORIES = 20

CLASSIFICATION = "classification"
REGRESSION = "regression"


class ColumnKind(str, Enum):
    CONTINUOUS = "continuous"
    BINARY = "binary"
    NOMINAL = "nominal"


def _label_sort_key(label: str):
    """Sort numeric labels by value, everything else lexicographically."""
    try:
        return (0, float(label), label)
    except ValueError:
        return (1, 0.0, label)


def _frozen_array(values, dtype=np.float64) -> np.ndarray:
    arr = np.ascontiguousarray(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Dataset:
    """N records of n typed feature columns plus one target column.

    ``X`` has shape (N, n). For classification the target holds category
    indices in ``[0, num_classes)``; for regression it holds finite reals.
    ``feature_categories[i]`` holds the original labels of nominal column i
    (``None`` for continuous/binary columns); ``target_categories`` likewise
    for classification targets.
    """

    feature_names: tuple[str, ...]
    feature_kinds: tuple[ColumnKind, ...]
    X: np.ndarray
    y: np.ndarray
    target_name: str
    task: str
    num_classes: int | None = None
    feature_categories: tuple[tuple[str, ...] | None, ...] = None  # type: ignore[assignment]
    target_categories: tuple[str, ...] | None = None

    def __post_init__(self):
        X = _frozen_array(self.X)
        y = _frozen_array(self.y)
        if X.ndim != 2:
            raise DatasetError("feature matrix must be 2-dimensional")
        n_records, n_features = X.shape
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)
        if self.feature_categories is None:
            object.__setattr__(
                self, "feature_categories", self._default_categories(X)
            )
        self._validate(n_records, n_features)

    def _default_categories(self, X):
        cats = []
        for j, kind in enumerate(self.feature_kinds):
            if kind is ColumnKind.NOMINAL:
                n_cat = int(X[:, j].max()) + 1 if X.shape[0] else 0
                cats.append(tuple(str(c) for c in range(n_cat)))
            else:
                cats.append(None)
        return tuple(cats)

    def _validate(self, n_records, n_features):
        if n_records < 2:
            raise EmptyDataError(f"need at least 2 records, got {n_records}")
        if n_features < 1:
            raise EmptyDataError("dataset has no feature columns")
        if len(self.feature_names) != n_features or len(self.feature_kinds) != n_features:
            raise DatasetError("feature names/kinds do not match matrix width")
        if len(set(self.feature_names)) != n_features:
            raise DatasetError("feature names must be unique")
        if self.target_name in self.feature_names:
            raise DatasetError("target name collides with a feature name")
        if self.y.shape != (n_records,):
            raise DatasetError("target length does not match record count")
        if not np.all(np.isfinite(self.X)):
            raise DatasetError("feature matrix contains non-finite values")
        for j, kind in enumerate(self.feature_kinds):
            col = self.X[:, j]
            if kind is ColumnKind.BINARY:
                if not np.all((col == 0.0) | (col == 1.0)):
                    raise DatasetError(f"binary column {self.feature_names[j]!r} has values outside {{0, 1}}")
            elif kind is ColumnKind.NOMINAL:
                cats = self.feature_categories[j]
                if cats is None or len(cats) < 2:
                    raise DatasetError(f"nominal column {self.feature_names[j]!r} needs >= 2 categories")
                if not np.all((col == np.floor(col)) & (col >= 0) & (col < len(cats))):
                    raise DatasetError(f"nominal column {self.feature_names[j]!r} has out-of-range codes")
        if self.task == CLASSIFICATION:
            if not self.num_classes or self.num_classes < 1:
                raise DatasetError("classification target needs num_classes >= 1")
            ok = np.all((self.y == np.floor(self.y)) & (self.y >= 0) & (self.y < self.num_classes))
            if not ok:
                raise DatasetError("classification target has out-of-range class codes")
        elif self.task == REGRESSION:
            if self.num_classes is not None:
                raise DatasetError("regression target must not carry num_classes")
            if not np.all(np.isfinite(self.y)):
                raise DatasetError("regression target contains non-finite values")
        else:
            raise DatasetError(f"unknown task {self.task!r}")

    # ------------------------------------------------------------- basics

    @property
    def n_records(self) -> int:
        return self.X.shape[0]

    @property
    def n_features(self) -> int:
        return self.X.shape[1]

    def __eq__(self, other):
        if not isinstance(other, Dataset):
            return NotImplemented
        return (
            self.feature_names == other.feature_names
            and self.feature_kinds == other.feature_kinds
            and self.target_name == other.target_name
            and self.task == other.task
            and self.num_classes == other.num_classes
            and self.feature_categories == other.feature_categories
            and self.target_categories == other.target_categories
            and np.array_equal(self.X, other.X)
            and np.array_equal(self.y, other.y)
        )

    def feature(self, j: int) -> np.ndarray:
        return self.X[:, j]

    def class_counts(self) -> np.ndarray:
        if self.task != CLASSIFICATION:
            raise DatasetError("class_counts is only defined for classification targets")
        return np.bincount(self.y.astype(np.int64), minlength=self.num_classes)

    def take_rows(self, indices) -> "Dataset":
        """Dataset restricted to the given record indices (order preserved)."""
        idx = np.asarray(indices, dtype=np.int64)
        return Dataset(
            feature_names=self.feature_names,
            feature_kinds=self.feature_kinds,
            X=self.X[idx],
            y=self.y[idx],
            target_name=self.target_name,
            task=self.task,
            num_classes=self.num_classes,
            feature_categories=self.feature_categories,
            target_categories=self.target_categories,
        )

    def take_features(self, indices) -> "Dataset":
        """Dataset restricted to the given feature columns; target unchanged."""
        idx = list(int(i) for i in indices)
        return Dataset(
            feature_names=tuple(self.feature_names[i] for i in idx),
            feature_kinds=tuple(self.feature_kinds[i] for i in idx),
            X=self.X[:, idx],
            y=self.y,
            target_name=self.target_name,
            task=self.task,
            num_classes=self.num_classes,
            feature_categories=tuple(self.feature_categories[i] for i in idx),
            target_categories=self.target_categories,
        )


# ------------------------------------------------------------------ ingest


def _parse_float(cell: str):
    try:
        value = float(cell)
    except ValueError:
        return None
    return value if math.isfinite(value) else None


def _encode_column(
    name: str,
    cells: list[str],
    override: ColumnKind | None,
    max_categories: int,
):
    """Infer/apply a column kind and encode cells to float64 values.

    Returns (kind, values, categories). Categories is None except for
    nominal columns, where it lists original labels in code order.
    """
    floats = [_parse_float(c) for c in cells]
    first_bad = next((i for i, v in enumerate(floats) if v is None), None)
    all_numeric = first_bad is None

    def as_nominal(labels):
        distinct = sorted(set(labels), key=_label_sort_key)
        if len(distinct) < 2:
            raise DatasetError(f"nominal column {name!r} needs >= 2 categories")
        code = {lab: i for i, lab in enumerate(distinct)}
        return np.array([code[lab] for lab in labels], dtype=np.float64), tuple(distinct)

    def canonical_labels():
        # Numeric nominal values get one canonical label per value so that
        # "1" and "1.0" land in the same category.
        if all_numeric:
            return [str(int(v)) if v == int(v) else repr(v) for v in floats]
        return cells

    if override is ColumnKind.CONTINUOUS:
        if not all_numeric:
            raise UnparseableCellError(first_bad, name, f"not a finite number: {cells[first_bad]!r}")
        return override, np.array(floats, dtype=np.float64), None
    if override is ColumnKind.BINARY:
        if not all_numeric:
            raise UnparseableCellError(first_bad, name, f"not a finite number: {cells[first_bad]!r}")
        values = np.array(floats, dtype=np.float64)
        bad = np.flatnonzero((values != 0.0) & (values != 1.0))
        if bad.size:
            raise UnparseableCellError(int(bad[0]), name, f"not in {{0, 1}}: {cells[int(bad[0])]!r}")
        return override, values, None
    if override is ColumnKind.NOMINAL:
        values, cats = as_nominal(canonical_labels())
        return override, values, cats

    # No override: infer.
    if all_numeric:
        values = np.array(floats, dtype=np.float64)
        if np.all((values == 0.0) | (values == 1.0)):
            return ColumnKind.BINARY, values, None
        if np.all(values == np.floor(values)) and len(np.unique(values)) <= max_categories:
            vals, cats = as_nominal(canonical_labels())
            return ColumnKind.NOMINAL, vals, cats
        return ColumnKind.CONTINUOUS, values, None
    distinct = set(cells)
    if len(distinct) <= max_categories:
        values, cats = as_nominal(cells)
        return ColumnKind.NOMINAL, values, cats
    raise UnparseableCellError(first_bad, name, f"not a finite number: {cells[first_bad]!r}")


def parse_schema(spec: str) -> dict[str, ColumnKind]:
    """Parse a ``name:kind,name:kind`` override string (CLI --schema)."""
    overrides = {}
    for part in spec.split(","):
        part = part.strip()
        if not part:
            continue
        name, sep, kind = part.rpartition(":")
        if not sep or not name:
            raise DatasetError(f"bad schema entry {part!r}, expected name:kind")
        try:
            overrides[name] = ColumnKind(kind.strip().lower())
        except ValueError:
            raise DatasetError(f"unknown column kind {kind!r} in schema") from None
    return overrides


def load_csv(
    path,
    target_name: str,
    schema: dict[str, ColumnKind] | None = None,
    max_categories: int = DEFAULT_MAX_CATEGORIES,
) -> Dataset:
    """Load an RFC-4180-style CSV (header row required) into a Dataset.

    Kind inference per column: all values in {0,1} -> binary; at most
    ``max_categories`` distinct integral or textual values -> nominal;
    otherwise continuous. ``schema`` overrides inference per column name.
    The target column is encoded the same way; binary/nominal targets
    become classification, continuous targets regression. Missing (empty
    or non-finite) cells are a hard error.
    """
    schema = dict(schema or {})
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise EmptyDataError(f"{path}: file is empty") from None
        rows = list(reader)

    if len(set(header)) != len(header):
        raise DatasetError(f"{path}: duplicate column names in header")
    if target_name not in header:
        raise MissingColumnError(f"target column {target_name!r} not in header {header}")
    unknown = set(schema) - set(header)
    if unknown:
        raise MissingColumnError(f"schema names unknown columns: {sorted(unknown)}")
    if not rows:
        raise EmptyDataError(f"{path}: no data rows")
    for i, row in enumerate(rows):
        if len(row) != len(header):
            raise RaggedRowError(i, len(header), len(row))
        for cell, name in zip(row, header):
            if cell == "":
                raise UnparseableCellError(i, name, "empty cell (missing values are not supported)")
            try:
                bad = not math.isfinite(float(cell))
            except ValueError:
                bad = False
            if bad:
                raise UnparseableCellError(i, name, f"non-finite value: {cell!r}")

    columns = {name: [row[j] for row in rows] for j, name in enumerate(header)}

    feature_names = tuple(h for h in header if h != target_name)
    kinds, cols, cats = [], [], []
    for name in feature_names:
        kind, values, categories = _encode_column(
            name, columns[name], schema.get(name), max_categories
        )
        kinds.append(kind)
        cols.append(values)
        cats.append(categories)

    t_kind, t_values, t_cats = _encode_column(
        target_name, columns[target_name], schema.get(target_name), max_categories
    )
    if t_kind is ColumnKind.CONTINUOUS:
        task, num_classes, target_categories = REGRESSION, None, None
    elif t_kind is ColumnKind.BINARY:
        task, num_classes, target_categories = CLASSIFICATION, 2, ("0", "1")
    else:
        task, num_classes, target_categories = CLASSIFICATION, len(t_cats), t_cats

    return Dataset(
        feature_names=feature_names,
        feature_kinds=tuple(kinds),
        X=np.column_stack(cols) if cols else np.empty((len(rows), 0)),
        y=t_values,
        target_name=target_name,
        task=task,
        num_classes=num_classes,
        feature_categories=tuple(cats),
        target_categories=target_categories,
    )


def _format_value(value: float, kind: ColumnKind, categories) -> str:
    if kind is ColumnKind.BINARY:
        return str(int(value))
    if kind is ColumnKind.NOMINAL:
        # datasets built in code may lack label metadata; emit the code
        return str(int(value)) if categories is None else categories[int(value)]
    return repr(float(value))


def write_csv(ds: Dataset, path) -> None:
    """Write a Dataset back to CSV. Reloading yields an equal Dataset."""
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(list(ds.feature_names) + [ds.target_name])
        if ds.task == CLASSIFICATION:
            t_kind = ColumnKind.BINARY if ds.target_categories == ("0", "1") else ColumnKind.NOMINAL
        else:
            t_kind = ColumnKind.CONTINUOUS
        for i in range(ds.n_records):
            row = [
                _format_value(ds.X[i, j], ds.feature_kinds[j], ds.feature_categories[j])
                for j in range(ds.n_features)
            ]
            row.append(_format_value(ds.y[i], t_kind, ds.target_categories))
            writer.writerow(row)


# --------------------------------------------------------------- splitting


@dataclass(frozen=True)
class FoldPlan:
    """Deterministic assignment of every record to one of k folds."""

    k_folds: int
    assignments: np.ndarray
    seed: int
    stratified: bool

    def __post_init__(self):
        object.__setattr__(self, "assignments", _frozen_array(self.assignments, np.int64))

    def test_indices(self, fold: int) -> np.ndarray:
        return np.flatnonzero(self.assignments == fold)

    def train_indices(self, fold: int) -> np.ndarray:
        return np.flatnonzero(self.assignments != fold)


def _deal_round_robin(rng, groups, k, n_records):
    """Assign each group's shuffled members to folds, rotating the fold that
    receives the remainder so overall fold sizes stay within one of each
    other."""
    assignments = np.empty(n_records, dtype=np.int64)
    next_extra = 0
    for members in groups:
        members = rng.permutation(members)
        base, extra = divmod(len(members), k)
        quota = np.full(k, base, dtype=np.int64)
        for e in range(extra):
            quota[(next_extra + e) % k] += 1
        next_extra = (next_extra + extra) % k
        pos = 0
        for fold in range(k):
            take = quota[fold]
            assignments[members[pos : pos + take]] = fold
            pos += take
    return assignments


def make_folds(ds: Dataset, k_folds: int, seed: int) -> FoldPlan:
    """Plan a k-fold partition; stratified when the target is classification.

    Fold sizes differ by at most one, and for classification each class is
    spread across folds within one of its proportional share.
    """
    if k_folds < 2:
        raise DatasetError(f"k_folds must be >= 2, got {k_folds}")
    if ds.n_records < k_folds:
        raise TooFewRecordsError(f"{ds.n_records} records cannot fill {k_folds} folds")
    rng = np.random.default_rng(seed)
    stratified = ds.task == CLASSIFICATION
    if stratified:
        y = ds.y.astype(np.int64)
        groups = []
        for cls in range(ds.num_classes):
            members = np.flatnonzero(y == cls)
            if 0 < members.size < k_folds:
                raise ClassTooSmallError(
                    f"class {cls} has {members.size} members, fewer than {k_folds} folds"
                )
            if members.size:
                groups.append(members)
    else:
        groups = [np.arange(ds.n_records)]
    assignments = _deal_round_robin(rng, groups, k_folds, ds.n_records)
    return FoldPlan(k_folds=k_folds, assignments=assignments, seed=seed, stratified=stratified)


def _apportion(count: int, fractions) -> list[int]:
    """Largest-remainder apportionment of `count` items over fractions."""
    raw = [count * f for f in fractions]
    sizes = [int(math.floor(r)) for r in raw]
    remainder = count - sum(sizes)
    order = sorted(range(len(fractions)), key=lambda j: (-(raw[j] - sizes[j]), j))
    for j in order[:remainder]:
        sizes[j] += 1
    return sizes


def split(ds: Dataset, fractions, seed: int):
    """Split into (train, validation, test) datasets by the given fractions.

    Deterministic given the seed; stratified for classification targets.
    """
    fractions = tuple(float(f) for f in fractions)
    if len(fractions) != 3 or any(f <= 0 for f in fractions):
        raise BadFractionsError(f"need three positive fractions, got {fractions}")
    if abs(sum(fractions) - 1.0) > 1e-9:
        raise BadFractionsError(f"fractions must sum to 1, got {sum(fractions)!r}")
    rng = np.random.default_rng(seed)
    if ds.task == CLASSIFICATION:
        y = ds.y.astype(np.int64)
        groups = [np.flatnonzero(y == cls) for cls in range(ds.num_classes)]
        groups = [g for g in groups if g.size]
    else:
        groups = [np.arange(ds.n_records)]
    parts = [[], [], []]
    for members in groups:
        members = rng.permutation(members)
        sizes = _apportion(len(members), fractions)
        pos = 0
        for part, size in zip(parts, sizes):
            part.append(members[pos : pos + size])
            pos += size
    picks = [np.sort(np.concatenate(p)) for p in parts]
    return tuple(ds.take_rows(p) for p in picks)
