import pytest

from qubofs.errors import MalformedReportError
from qubofs.evaluate import EvaluationReport, MetricRow, aggregate_rows
from qubofs.report import render_report


def make_report(cells):
    """cells: list of (method, k, model, metric, fold_values)."""
    rows = []
    for method, k, model, metric, values in cells:
        for fold, value in enumerate(values):
            rows.append(MetricRow(method, k, model, fold, metric, value))
    rows = tuple(rows)
    return EvaluationReport(rows=rows, aggregates=aggregate_rows(rows))


class TestCsv:
    def test_single_method_all_cells_marked(self):
        report = make_report(
            [
                ("topk-anova", 2, "knn", "accuracy", [0.8, 0.9]),
                ("topk-anova", 2, "knn", "f1", [0.7, 0.8]),
            ]
        )
        table_line = render_report(report, "csv").splitlines()[1]
        assert table_line == "F Test,0.850000*,0.750000*"

    def test_dominating_method_takes_every_marker(self):
        report = make_report(
            [
                ("qfs-mi", 2, "knn", "accuracy", [0.9, 1.0]),
                ("qfs-mi", 2, "knn", "f1", [0.9, 0.9]),
                ("topk-anova", 2, "knn", "accuracy", [0.5, 0.6]),
                ("topk-anova", 2, "knn", "f1", [0.4, 0.5]),
            ]
        )
        lines = render_report(report, "csv").splitlines()
        assert lines[1].count("*") == 2
        assert lines[2].count("*") == 0

    def test_rmse_marker_goes_to_minimum(self):
        report = make_report(
            [
                ("original", 4, "knn-reg", "rmse", [1.0, 1.2]),
                ("topk-spearman", 2, "knn-reg", "rmse", [0.5, 0.7]),
            ]
        )
        lines = render_report(report, "csv").splitlines()
        assert "*" not in lines[1]
        assert lines[2].endswith("0.600000*")

    def test_tied_best_marks_both(self):
        report = make_report(
            [
                ("qfs-mi", 2, "knn", "accuracy", [0.8, 0.8]),
                ("topk-anova", 2, "knn", "accuracy", [0.7, 0.9]),
            ]
        )
        lines = render_report(report, "csv").splitlines()
        assert lines[1].endswith("*") and lines[2].endswith("*")

    def test_detail_section_present(self):
        report = make_report([("original", 3, "knn", "accuracy", [1.0, 0.5])])
        text = render_report(report, "csv")
        blank = text.splitlines().index("")
        detail = text.splitlines()[blank + 1 :]
        assert detail[0] == "Method,k,Model,Fold,Metric,Value"
        assert detail[1] == "original,3,knn,0,accuracy,1.0"
        assert detail[2] == "original,3,knn,1,accuracy,0.5"

    def test_multiple_k_rows_stay_distinct(self):
        report = make_report(
            [
                ("topk-anova", 2, "knn", "accuracy", [0.8]),
                ("topk-anova", 4, "knn", "accuracy", [0.9]),
            ]
        )
        lines = render_report(report, "csv").splitlines()
        assert lines[1].startswith("F Test (k=2),")
        assert lines[2].startswith("F Test (k=4),")


class TestMarkdown:
    def test_structure(self):
        report = make_report([("original", 3, "knn", "accuracy", [1.0, 0.5])])
        lines = render_report(report, "markdown").splitlines()
        assert lines[0].startswith("| Method")
        assert set(lines[1]) <= {"|", "-", " "}
        assert "0.750000*" in lines[2]


class TestErrors:
    def test_unknown_format(self):
        report = make_report([("original", 3, "knn", "accuracy", [1.0])])
        with pytest.raises(MalformedReportError):
            render_report(report, "html")

    def test_empty_report(self):
        report = EvaluationReport(rows=(), aggregates=())
        with pytest.raises(MalformedReportError):
            render_report(report, "csv")
