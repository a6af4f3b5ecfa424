"""Command-line pipeline: load-check, score, build-qubo, solve, select,
project, bench, report, and synth.

Every stage reads and writes JSON or CSV artifacts so runs can be
inspected and replayed piecewise. Artifacts are written atomically
(temp file, then rename) and carry a `schema_version` plus a single
volatile `timestamp` field; replaying a command with the same inputs and
seed reproduces the artifact byte for byte once the timestamp is
excluded.

Exit codes: 0 success, 1 usage error (bad flags or enum values),
2 data error (unreadable or inconsistent inputs), 3 internal error.
Option precedence: command-line flags, then the --config JSON file,
then built-in defaults.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from .dataset import Dataset, load_csv, parse_schema, write_csv
from .errors import (
    AlphaOutOfRangeError,
    DatasetError,
    KTargetOutOfRangeError,
    MalformedReportError,
    QubofsError,
    UnknownBackendError,
)
from .evaluate import EvaluationReport, run_benchmark
from .kernels import active_impl
from .models import MODEL_TAGS, parse_model
from .qubo import QuboInstance, build_qubo
from .report import FORMATS, render_report
from .selection import (
    METHOD_TAGS,
    OriginalMethod,
    QfsMethod,
    Selection,
    TopKMethod,
    parse_method,
    project,
    select,
)
from .solver import backend_solve, list_backends
from .stats import Measure, ScoreSet, score_dataset
from .synthetic import make_planted_classification, make_synthetic_regression


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad flags; the artifact contract
    # reserves 2 for data errors, so route usage problems through 1.
    def error(self, message):
        raise _UsageError(f"{self.prog}: {message}")


_MEASURES = {
    "spearman": Measure.SPEARMAN_ABS,
    "mi": Measure.MUTUAL_INFORMATION,
    "chi2": Measure.CHI_SQUARED,
    "anova": Measure.ANOVA_F,
}

_USAGE_ERRORS = (
    _UsageError,
    UnknownBackendError,
    AlphaOutOfRangeError,
    KTargetOutOfRangeError,
)

_DATA_ERRORS = (
    DatasetError,
    MalformedReportError,
    QubofsError,
    FileNotFoundError,
    IsADirectoryError,
    PermissionError,
    json.JSONDecodeError,
    UnicodeDecodeError,
)


def _timestamp() -> str:
    return datetime.now(timezone.utc).isoformat()


def _atomic_write(path, content: str) -> None:
    path = Path(path)
    tmp = path.with_name(f".{path.name}.tmp{os.getpid()}")
    tmp.write_text(content, encoding="utf-8")
    os.replace(tmp, path)


def _emit_json(payload: dict, out: str | None) -> None:
    payload = dict(payload)
    payload["timestamp"] = _timestamp()
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if out is None:
        sys.stdout.write(text)
    else:
        _atomic_write(out, text)


def _emit_text(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        _atomic_write(out, text)


def _read_json(path) -> dict:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    payload = _read_json(path)
    if not isinstance(payload, dict):
        raise MalformedReportError(f"config {path} must hold a JSON object")
    return payload


class _Options:
    """Flag values with config-file and default fallbacks."""

    def __init__(self, args: argparse.Namespace, config: dict):
        self._args = args
        self._config = config

    def get(self, name: str, default=None):
        value = getattr(self._args, name, None)
        if value is not None:
            return value
        if name in self._config:
            return self._config[name]
        return default

    def require(self, name: str, flag: str):
        value = self.get(name)
        if value is None:
            raise _UsageError(f"missing required option {flag}")
        return value


def _load_dataset(opts: _Options) -> Dataset:
    data = opts.require("data", "--data")
    target = opts.require("target", "--target")
    schema = opts.get("schema")
    overrides = parse_schema(schema) if schema else None
    return load_csv(data, target, schema=overrides)


def _measure(opts: _Options, default: str) -> Measure:
    name = str(opts.get("measure", default))
    if name not in _MEASURES:
        raise _UsageError(
            f"unknown measure {name!r}; expected one of {', '.join(sorted(_MEASURES))}"
        )
    return _MEASURES[name]


def _int_list(raw) -> list[int]:
    if isinstance(raw, (list, tuple)):
        return [int(v) for v in raw]
    return [int(part) for part in str(raw).split(",") if part.strip()]


def _str_list(raw) -> list[str]:
    if isinstance(raw, (list, tuple)):
        return [str(v) for v in raw]
    return [part.strip() for part in str(raw).split(",") if part.strip()]


def _solver_params(opts: _Options) -> dict:
    params = {}
    for key in ("sweeps", "restarts"):
        value = opts.get(key)
        if value is not None:
            params[key] = int(value)
    for key in ("beta_start", "beta_end"):
        value = opts.get(key)
        if value is not None:
            params[key] = float(value)
    value = opts.get("auto_cap")
    if value is not None:
        params["auto_cap"] = int(value)
    return params


def _cmd_load_check(opts: _Options) -> None:
    ds = _load_dataset(opts)
    _emit_json(
        {
            "kind": "load_check",
            "schema_version": 1,
            "records": ds.n_records,
            "features": ds.n_features,
            "feature_kinds": {
                name: kind.value
                for name, kind in zip(ds.feature_names, ds.feature_kinds)
            },
            "target": ds.target_name,
            "task": ds.task,
            "num_classes": ds.num_classes,
        },
        opts.get("out"),
    )


def _cmd_score(opts: _Options) -> None:
    ds = _load_dataset(opts)
    measure = _measure(opts, "mi")
    scores = score_dataset(
        ds,
        measure,
        bins=int(opts.get("bins", 10)),
        threads=int(opts.get("threads", 1)),
    )
    _emit_json(scores.to_json_dict(), opts.get("out"))


def _cmd_build_qubo(opts: _Options) -> None:
    payload = _read_json(opts.require("scores", "--scores"))
    scores = ScoreSet.from_json_dict(payload)
    alpha = float(opts.require("alpha", "--alpha"))
    q = build_qubo(scores, alpha)
    if opts.get("format", "json") == "sparse":
        _emit_text(q.to_sparse_text(), opts.get("out"))
    else:
        _emit_json(q.to_json_dict(), opts.get("out"))


def _cmd_solve(opts: _Options) -> None:
    payload = _read_json(opts.require("qubo", "--qubo"))
    q = QuboInstance.from_json_dict(payload)
    backend = str(opts.get("backend", "exhaustive"))
    params = _solver_params(opts)
    params["seed"] = int(opts.require("seed", "--seed"))
    result = backend_solve(q, backend, params)
    artifact = result.to_json_dict()
    artifact["backend"] = backend
    _emit_json(artifact, opts.get("out"))


def _select_method(opts: _Options, family: str):
    if family == "original":
        return OriginalMethod()
    if family == "qfs":
        return QfsMethod(_measure(opts, "mi"), backend=str(opts.get("backend", "auto")))
    if family == "topk":
        return TopKMethod(_measure(opts, "anova"))
    raise _UsageError(f"unknown method family {family!r}; expected qfs, topk, or original")


def _cmd_select(opts: _Options, family: str) -> None:
    ds = _load_dataset(opts)
    method = _select_method(opts, family)
    selection = select(
        ds,
        method,
        int(opts.get("k", ds.n_features)),
        seed=int(opts.require("seed", "--seed")),
        bins=int(opts.get("bins", 10)),
        cardinality_tolerance=float(opts.get("tolerance", 0.1)),
        solver_params=_solver_params(opts) or None,
        threads=int(opts.get("threads", 1)),
    )
    artifact = selection.to_json_dict()
    artifact["feature_names"] = [ds.feature_names[i] for i in selection.feature_indices]
    _emit_json(artifact, opts.get("out"))


def _cmd_project(opts: _Options) -> None:
    ds = _load_dataset(opts)
    selection = Selection.from_json_dict(_read_json(opts.require("selection", "--selection")))
    projected = project(ds, selection)
    out = opts.get("out")
    if out is None:
        raise _UsageError("project writes a CSV file; pass --out")
    tmp = Path(out).with_name(f".{Path(out).name}.tmp{os.getpid()}")
    write_csv(projected, tmp)
    os.replace(tmp, out)


def _cmd_bench(opts: _Options) -> None:
    ds = _load_dataset(opts)
    methods = [parse_method(tag) for tag in _str_list(opts.get("methods", "qfs-mi,topk-anova,original"))]
    models = [parse_model(tag) for tag in _str_list(opts.get("models", "knn"))]
    report = run_benchmark(
        ds,
        methods,
        _int_list(opts.get("k", "5")),
        models,
        k_folds=int(opts.get("folds", 5)),
        seed=int(opts.require("seed", "--seed")),
        bins=int(opts.get("bins", 10)),
        global_selection=bool(opts.get("global_selection", False)),
        cardinality_tolerance=float(opts.get("tolerance", 0.1)),
        solver_params=_solver_params(opts) or None,
        threads=int(opts.get("threads", 1)),
    )
    _emit_json(report.to_json_dict(), opts.get("out"))


def _cmd_report(opts: _Options) -> None:
    payload = _read_json(opts.require("report", "--report"))
    report = EvaluationReport.from_json_dict(payload)
    fmt = str(opts.get("format", "csv"))
    if fmt not in FORMATS:
        raise _UsageError(f"unknown format {fmt!r}; expected one of {', '.join(FORMATS)}")
    _emit_text(render_report(report, fmt), opts.get("out"))


def _cmd_synth(opts: _Options) -> None:
    kind = str(opts.get("kind", "planted"))
    seed = int(opts.require("seed", "--seed"))
    out = opts.get("out")
    if out is None:
        raise _UsageError("synth writes a CSV file; pass --out")
    if kind == "planted":
        ds, groups = make_planted_classification(seed)
    elif kind == "regression":
        ds = make_synthetic_regression(seed)
        groups = None
    else:
        raise _UsageError(f"unknown synthetic kind {kind!r}; expected planted or regression")
    tmp = Path(out).with_name(f".{Path(out).name}.tmp{os.getpid()}")
    write_csv(ds, tmp)
    os.replace(tmp, out)
    if groups is not None and opts.get("groups_out") is not None:
        _emit_json(
            {
                "kind": "planted_groups",
                "schema_version": 1,
                "groups": [g if g is None else int(g) for g in groups],
            },
            opts.get("groups_out"),
        )


def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", help="JSON file with default option values")
    sub.add_argument("--out", help="output path (default: stdout for text artifacts)")
    sub.add_argument("--threads", type=int, help="worker thread cap (default 1)")


def _add_dataset_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--data", help="input CSV path")
    sub.add_argument("--target", help="target column name")
    sub.add_argument("--schema", help="column kind overrides, name:kind,...")


def _add_solver_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--sweeps", type=int, help="annealing sweeps per restart")
    sub.add_argument("--restarts", type=int, help="independent annealing restarts")
    sub.add_argument("--beta-start", dest="beta_start", type=float)
    sub.add_argument("--beta-end", dest="beta_end", type=float)
    sub.add_argument("--auto-cap", dest="auto_cap", type=int,
                     help="auto backend: exhaustive up to this size")


def _build_parser() -> _Parser:
    parser = _Parser(prog="qubofs", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--version", action="version", version=f"qubofs {__version__}")
    commands = parser.add_subparsers(dest="command", metavar="command")

    sub = commands.add_parser("load-check", help="validate a CSV and print its schema")
    _add_dataset_flags(sub)
    _add_common(sub)

    sub = commands.add_parser("score", help="importance/redundancy matrix for a dataset")
    _add_dataset_flags(sub)
    sub.add_argument("--measure", help="mi or spearman (default mi)")
    sub.add_argument("--bins", type=int, help="quantile bins for mutual information")
    _add_common(sub)

    sub = commands.add_parser("build-qubo", help="combine scores into a QUBO at a given alpha")
    sub.add_argument("--scores", help="score artifact from the score stage")
    sub.add_argument("--alpha", type=float, help="trade-off weight in [0, 1]")
    sub.add_argument("--format", choices=("json", "sparse"), help="artifact format")
    _add_common(sub)

    sub = commands.add_parser("solve", help="minimize a QUBO artifact")
    sub.add_argument("--qubo", help="QUBO artifact path")
    sub.add_argument("--backend", help=f"one of {', '.join(list_backends())}")
    sub.add_argument("--seed", type=int, help="RNG seed (required; no wall-clock seeding)")
    _add_solver_flags(sub)
    _add_common(sub)

    sub = commands.add_parser("select", help="pick k features from a dataset")
    sub.add_argument("family", choices=("qfs", "topk", "original"),
                     help="selection method family")
    _add_dataset_flags(sub)
    sub.add_argument("--measure", help="qfs: mi|spearman; topk: anova|chi2")
    sub.add_argument("--k", type=int, help="target feature count")
    sub.add_argument("--backend", help="qfs solver backend (default auto)")
    sub.add_argument("--seed", type=int, help="RNG seed (required)")
    sub.add_argument("--bins", type=int)
    sub.add_argument("--tolerance", type=float, help="accepted relative cardinality miss")
    _add_solver_flags(sub)
    _add_common(sub)

    sub = commands.add_parser("project", help="write the dataset restricted to a selection")
    _add_dataset_flags(sub)
    sub.add_argument("--selection", help="selection artifact path")
    _add_common(sub)

    sub = commands.add_parser("bench", help="cross-validated method comparison")
    _add_dataset_flags(sub)
    sub.add_argument("--methods", help="comma-separated method tags "
                     f"({', '.join(sorted(METHOD_TAGS))})")
    sub.add_argument("--models", help="comma-separated model tags "
                     f"({', '.join(sorted(MODEL_TAGS))})")
    sub.add_argument("--k", help="comma-separated feature counts")
    sub.add_argument("--folds", type=int, help="cross-validation folds (default 5)")
    sub.add_argument("--seed", type=int, help="RNG seed (required)")
    sub.add_argument("--bins", type=int)
    sub.add_argument("--tolerance", type=float)
    sub.add_argument("--global-selection", dest="global_selection",
                     action="store_const", const=True,
                     help="select once on the full dataset instead of per fold")
    _add_solver_flags(sub)
    _add_common(sub)

    sub = commands.add_parser("report", help="render an evaluation report as a table")
    sub.add_argument("--report", help="evaluation report JSON path")
    sub.add_argument("--format", help="csv or markdown (default csv)")
    _add_common(sub)

    sub = commands.add_parser("synth", help="write a synthetic benchmark dataset")
    sub.add_argument("--kind", help="planted or regression (default planted)")
    sub.add_argument("--seed", type=int, help="RNG seed (required)")
    sub.add_argument("--groups-out", dest="groups_out",
                     help="also write the planted group map as JSON")
    _add_common(sub)

    sub = commands.add_parser("backends", help="list solver backends and the active kernel")
    _add_common(sub)
    return parser


def _dispatch(args: argparse.Namespace) -> None:
    opts = _Options(args, _load_config(getattr(args, "config", None)))
    command = args.command
    if command == "load-check":
        _cmd_load_check(opts)
    elif command == "score":
        _cmd_score(opts)
    elif command == "build-qubo":
        _cmd_build_qubo(opts)
    elif command == "solve":
        _cmd_solve(opts)
    elif command == "select":
        _cmd_select(opts, args.family)
    elif command == "project":
        _cmd_project(opts)
    elif command == "bench":
        _cmd_bench(opts)
    elif command == "report":
        _cmd_report(opts)
    elif command == "synth":
        _cmd_synth(opts)
    elif command == "backends":
        _emit_json(
            {
                "kind": "backends",
                "schema_version": 1,
                "backends": list_backends(),
                "kernel": active_impl(),
            },
            opts.get("out"),
        )
    else:
        raise _UsageError("missing command; run with --help for usage")


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        _dispatch(args)
        return 0
    except _USAGE_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except _DATA_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # pragma: no cover - defensive
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main(argv=None))
