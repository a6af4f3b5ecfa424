"""Render evaluation reports as comparison tables.

The aggregate table has one row per (method, k) and one column per
(model, metric) pair; the best value in each column is marked with a
trailing ``*``. Higher is better for accuracy and f1, lower for rmse.
A per-fold detail section follows so plots can be rebuilt from the flat
file alone.
"""

from __future__ import annotations

import csv
import io

from .errors import MalformedReportError
from .evaluate import EvaluationReport
from .models import MODEL_TAGS
from .selection import METHOD_TAGS

FORMATS = ("csv", "markdown")

_METRIC_TITLES = {
    "accuracy": "Average Accuracy",
    "f1": "Average f1",
    "rmse": "Average RMSE",
}

_LOWER_IS_BETTER = {"rmse"}


def _method_title(tag: str, k: int, original_k: bool) -> str:
    label = METHOD_TAGS[tag].label if tag in METHOD_TAGS else tag
    if tag == "original" or original_k:
        return label
    return f"{label} (k={k})"


def _model_title(tag: str) -> str:
    return MODEL_TAGS[tag]().label if tag in MODEL_TAGS else tag


def _column_title(model: str, metric: str, n_models: int) -> str:
    metric_title = _METRIC_TITLES.get(metric, metric)
    if n_models == 1:
        return metric_title
    return f"{metric_title} ({_model_title(model)})"


def _table(report: EvaluationReport):
    """Header row plus body rows; best cells carry the ``*`` marker."""
    row_keys = []
    col_keys = []
    cells = {}
    for agg in report.aggregates:
        rk = (agg.method, agg.k)
        ck = (agg.model, agg.metric)
        if rk not in row_keys:
            row_keys.append(rk)
        if ck not in col_keys:
            col_keys.append(ck)
        cells[(rk, ck)] = agg.mean
    if not cells:
        raise MalformedReportError("report has no aggregates to render")
    single_k = len({rk[1] for rk in row_keys if rk[0] != "original"}) <= 1
    n_models = len({ck[0] for ck in col_keys})
    header = ["Method"] + [_column_title(m, met, n_models) for m, met in col_keys]
    body = []
    for rk in row_keys:
        body.append([_method_title(rk[0], rk[1], single_k)])
    for ck in col_keys:
        values = [cells.get((rk, ck)) for rk in row_keys]
        present = [v for v in values if v is not None]
        if ck[1] in _LOWER_IS_BETTER:
            best = min(present)
        else:
            best = max(present)
        for row, value in zip(body, values):
            if value is None:
                row.append("")
            elif value == best:
                row.append(f"{value:.6f}*")
            else:
                row.append(f"{value:.6f}")
    return header, body


def _detail_rows(report: EvaluationReport):
    rows = sorted(
        report.rows, key=lambda r: (r.method, r.k, r.model, r.metric, r.fold)
    )
    header = ["Method", "k", "Model", "Fold", "Metric", "Value"]
    body = [
        [r.method, str(r.k), r.model, str(r.fold), r.metric, repr(r.value)]
        for r in rows
    ]
    return header, body


def _render_csv(report: EvaluationReport) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    header, body = _table(report)
    writer.writerow(header)
    writer.writerows(body)
    writer.writerow([])
    header, body = _detail_rows(report)
    writer.writerow(header)
    writer.writerows(body)
    return out.getvalue()


def _markdown_table(header, body) -> str:
    widths = [
        max(len(header[i]), *(len(row[i]) for row in body)) if body else len(header[i])
        for i in range(len(header))
    ]
    def fmt(row):
        return "| " + " | ".join(cell.ljust(w) for cell, w in zip(row, widths)) + " |"
    lines = [fmt(header), "| " + " | ".join("-" * w for w in widths) + " |"]
    lines.extend(fmt(row) for row in body)
    return "\n".join(lines)


def _render_markdown(report: EvaluationReport) -> str:
    parts = [_markdown_table(*_table(report))]
    parts.append("")
    parts.append(_markdown_table(*_detail_rows(report)))
    return "\n".join(parts) + "\n"


def render_report(report: EvaluationReport, fmt: str = "csv") -> str:
    """Comparison table for ``report`` in the requested format."""
    if fmt == "csv":
        return _render_csv(report)
    if fmt == "markdown":
        return _render_markdown(report)
    raise MalformedReportError(f"unknown report format {fmt!r}; expected csv or markdown")
