"""Benchmark harness: per-fold selection, model training, and metrics.

``run_benchmark`` evaluates each selection method on every fold of a
dataset: features are selected on the training records only, the models
are fit on the projected training fold, and metrics are computed on the
held-out fold. Aggregates carry the mean and sample standard deviation
over folds and are validated against the per-fold rows on construction.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .dataset import CLASSIFICATION, Dataset, FoldPlan, make_folds
from .errors import (
    DegenerateInputError,
    LengthMismatchError,
    MalformedReportError,
    QubofsError,
)
from .models import Model, fit_predict, parse_model
from .selection import OriginalMethod, SelectionMethod, parse_method, project, select

SCHEMA_VERSION = 1

AGGREGATE_TOLERANCE = 1e-12


def _as_vector(values, name: str) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 1:
        raise LengthMismatchError(f"{name} must be one-dimensional")
    return arr


def _check_pair(pred, truth) -> tuple[np.ndarray, np.ndarray]:
    p = _as_vector(pred, "pred")
    t = _as_vector(truth, "truth")
    if p.shape[0] != t.shape[0]:
        raise LengthMismatchError(f"length mismatch: {p.shape[0]} vs {t.shape[0]}")
    if p.shape[0] < 1:
        raise LengthMismatchError("need at least one prediction")
    return p, t


def accuracy(pred, truth) -> float:
    """Fraction of predictions exactly equal to the truth."""
    p, t = _check_pair(pred, truth)
    return float((p == t).mean())


def error_rate(pred, truth) -> float:
    # Defined as the complement so accuracy + error_rate == 1 exactly.
    return 1.0 - accuracy(pred, truth)


def f1_score(pred, truth, positive_class) -> float:
    """Harmonic mean of precision and recall for ``positive_class``.

    Returns 0 when no positives are predicted and none are present.
    """
    p, t = _check_pair(pred, truth)
    pred_pos = p == positive_class
    true_pos = t == positive_class
    tp = float(np.count_nonzero(pred_pos & true_pos))
    fp = float(np.count_nonzero(pred_pos & ~true_pos))
    fn = float(np.count_nonzero(~pred_pos & true_pos))
    precision = tp / (tp + fp) if tp + fp > 0 else 0.0
    recall = tp / (tp + fn) if tp + fn > 0 else 0.0
    if precision + recall == 0.0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


def rmse(pred, truth) -> float:
    """Root mean squared error."""
    p, t = _check_pair(pred, truth)
    return math.sqrt(float(((p - t) ** 2).mean()))


def minority_class(y: np.ndarray, num_classes: int) -> int:
    """Least frequent class code; ties resolve to the larger code."""
    counts = np.bincount(y.astype(np.int64), minlength=num_classes)
    return int(num_classes - 1 - np.argmin(counts[::-1]))


@dataclass(frozen=True)
class MetricRow:
    method: str
    k: int
    model: str
    fold: int
    metric: str
    value: float

    def to_json_dict(self) -> dict:
        return {
            "method": self.method,
            "k": self.k,
            "model": self.model,
            "fold": self.fold,
            "metric": self.metric,
            "value": self.value,
        }


@dataclass(frozen=True)
class MetricAggregate:
    method: str
    k: int
    model: str
    metric: str
    mean: float
    std: float

    def to_json_dict(self) -> dict:
        return {
            "method": self.method,
            "k": self.k,
            "model": self.model,
            "metric": self.metric,
            "mean": self.mean,
            "std": self.std,
        }


def _group_key(row: MetricRow) -> tuple:
    return (row.method, row.k, row.model, row.metric)


def aggregate_rows(rows: Sequence[MetricRow]) -> tuple[MetricAggregate, ...]:
    """Mean and sample standard deviation per (method, k, model, metric)."""
    groups: dict[tuple, list[float]] = {}
    order: list[tuple] = []
    for row in rows:
        key = _group_key(row)
        if key not in groups:
            groups[key] = []
            order.append(key)
        groups[key].append(row.value)
    out = []
    for key in order:
        values = np.array(groups[key])
        std = float(values.std(ddof=1)) if values.shape[0] > 1 else 0.0
        method, k, model, metric = key
        out.append(
            MetricAggregate(
                method=method,
                k=k,
                model=model,
                metric=metric,
                mean=float(values.mean()),
                std=std,
            )
        )
    return tuple(out)


@dataclass(frozen=True)
class EvaluationReport:
    rows: tuple[MetricRow, ...]
    aggregates: tuple[MetricAggregate, ...]
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        recomputed = {
            (a.method, a.k, a.model, a.metric): a for a in aggregate_rows(self.rows)
        }
        stated = {(a.method, a.k, a.model, a.metric): a for a in self.aggregates}
        if set(recomputed) != set(stated):
            raise MalformedReportError("aggregate groups do not match per-fold rows")
        for key, agg in stated.items():
            ref = recomputed[key]
            if (
                abs(agg.mean - ref.mean) > AGGREGATE_TOLERANCE
                or abs(agg.std - ref.std) > AGGREGATE_TOLERANCE
            ):
                raise MalformedReportError(
                    f"aggregate for {key} is not recomputable from rows"
                )

    def to_json_dict(self) -> dict:
        return {
            "kind": "evaluation_report",
            "schema_version": SCHEMA_VERSION,
            "rows": [r.to_json_dict() for r in self.rows],
            "aggregates": [a.to_json_dict() for a in self.aggregates],
            "metadata": self.metadata,
        }

    @classmethod
    def from_json_dict(cls, payload: dict) -> "EvaluationReport":
        if payload.get("kind") != "evaluation_report":
            raise MalformedReportError(f"unexpected kind {payload.get('kind')!r}")
        rows = tuple(MetricRow(**r) for r in payload["rows"])
        aggregates = tuple(MetricAggregate(**a) for a in payload["aggregates"])
        return cls(rows=rows, aggregates=aggregates, metadata=payload.get("metadata", {}))


def _cell_seed(base_seed: int, method_idx: int, k_idx: int, fold_idx: int) -> int:
    seq = np.random.SeedSequence([base_seed, method_idx, k_idx, fold_idx])
    return int(seq.generate_state(1)[0])


def _metric_values(task: str, preds: np.ndarray, truth: np.ndarray, positive: Optional[int]):
    if task == CLASSIFICATION:
        return [
            ("accuracy", accuracy(preds, truth)),
            ("f1", f1_score(preds, truth, positive)),
        ]
    return [("rmse", rmse(preds, truth))]


def run_benchmark(
    ds: Dataset,
    methods: Sequence[SelectionMethod | str],
    k_list: Sequence[int],
    models: Sequence[Model | str],
    k_folds: int = 5,
    seed: int = 0,
    *,
    bins: int = 10,
    global_selection: bool = False,
    cardinality_tolerance: float = 0.1,
    solver_params: Optional[dict] = None,
    folds: Optional[FoldPlan] = None,
    threads: int = 1,
) -> EvaluationReport:
    """Cross-validated comparison of selection methods.

    Selection runs inside each fold on the training records only, so
    held-out records never influence which features are kept. Passing
    ``global_selection=True`` instead selects once on the full dataset,
    the literal but leaky alternative.
    """
    if k_folds < 2:
        raise DegenerateInputError(f"k_folds must be at least 2, got {k_folds}")
    if not methods or not models:
        raise DegenerateInputError("need at least one method and one model")
    methods = [parse_method(m) if isinstance(m, str) else m for m in methods]
    models = [parse_model(m) if isinstance(m, str) else m for m in models]
    if not k_list and any(not isinstance(m, OriginalMethod) for m in methods):
        raise DegenerateInputError("need at least one k for non-trivial methods")
    for model in models:
        if model.task != ds.task:
            raise DegenerateInputError(
                f"{type(model).__name__} does not apply to a {ds.task} dataset"
            )
    if folds is None:
        folds = make_folds(ds, k_folds, seed)
    elif folds.k_folds != k_folds:
        raise DegenerateInputError(
            f"fold plan has {folds.k_folds} folds, expected {k_folds}"
        )
    positive = (
        minority_class(ds.y, ds.num_classes) if ds.task == CLASSIFICATION else None
    )

    cells = []
    for m_idx, method in enumerate(methods):
        ks = [None] if isinstance(method, OriginalMethod) else list(k_list)
        for k_idx, k in enumerate(ks):
            cells.append((m_idx, method, k_idx, k))

    def run_cell(cell):
        m_idx, method, k_idx, k = cell
        rows = []
        records = []
        global_sel = None
        if global_selection:
            global_sel = select(
                ds,
                method,
                ds.n_features if k is None else k,
                seed=_cell_seed(seed, m_idx, k_idx, k_folds),
                bins=bins,
                cardinality_tolerance=cardinality_tolerance,
                solver_params=solver_params,
            )
        for fold_idx in range(folds.k_folds):
            context = f"method={method.tag} k={k} fold={fold_idx}"
            try:
                train = ds.take_rows(folds.train_indices(fold_idx))
                test = ds.take_rows(folds.test_indices(fold_idx))
                if global_sel is not None:
                    sel = global_sel
                else:
                    sel = select(
                        train,
                        method,
                        train.n_features if k is None else k,
                        seed=_cell_seed(seed, m_idx, k_idx, fold_idx),
                        bins=bins,
                        cardinality_tolerance=cardinality_tolerance,
                        solver_params=solver_params,
                    )
                ptrain = project(train, sel)
                ptest = project(test, sel)
                row_k = ds.n_features if k is None else k
                records.append(
                    {
                        "method": method.tag,
                        "k": row_k,
                        "fold": fold_idx,
                        "feature_indices": list(sel.feature_indices),
                    }
                )
                for model in models:
                    context = f"method={method.tag} k={k} model={model.tag} fold={fold_idx}"
                    preds = fit_predict(model, ptrain, ptest)
                    for metric, value in _metric_values(ds.task, preds, test.y, positive):
                        rows.append(
                            MetricRow(
                                method=method.tag,
                                k=row_k,
                                model=model.tag,
                                fold=fold_idx,
                                metric=metric,
                                value=value,
                            )
                        )
            except QubofsError as exc:
                exc.args = tuple(exc.args) + (f"while evaluating {context}",)
                raise
        return rows, records

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run_cell, cells))
    else:
        results = [run_cell(cell) for cell in cells]

    all_rows = []
    all_records = []
    for rows, records in results:
        all_rows.extend(rows)
        all_records.extend(records)
    all_rows = tuple(all_rows)
    metadata = {
        "seed": seed,
        "k_folds": k_folds,
        "k_list": list(k_list),
        "methods": [m.tag for m in methods],
        "models": [m.tag for m in models],
        "bins": bins,
        "task": ds.task,
        "positive_class": positive,
        "global_selection": global_selection,
        "selections": all_records,
    }
    return EvaluationReport(
        rows=all_rows, aggregates=aggregate_rows(all_rows), metadata=metadata
    )
