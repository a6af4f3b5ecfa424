"""QUBO-based feature selection.

Feature selection cast as quadratic unconstrained binary optimization:
statistical importance rewards keeping a feature, pairwise redundancy
penalizes keeping overlapping ones, and a trade-off weight alpha tuned
by binary search hits a requested feature count. Local solvers
(exhaustive scan and simulated annealing over a compiled or pure-Python
kernel), a cross-validated benchmark harness, and a CLI round out the
pipeline.
"""

from .alpha_search import AlphaSearchConfig, AlphaSearchResult, probe_alpha, search_alpha
from .dataset import (
    CLASSIFICATION,
    REGRESSION,
    ColumnKind,
    Dataset,
    FoldPlan,
    load_csv,
    make_folds,
    split,
    write_csv,
)
from .errors import QubofsError
from .evaluate import (
    EvaluationReport,
    accuracy,
    error_rate,
    f1_score,
    rmse,
    run_benchmark,
)
from .kernels import active_impl
from .models import (
    DecisionTreeRegressor,
    KnnClassifier,
    KnnRegressor,
    LogisticRegression,
    fit_predict,
    parse_model,
)
from .qubo import QuboInstance, build_qubo
from .report import render_report
from .selection import (
    OriginalMethod,
    QfsMethod,
    Selection,
    TopKMethod,
    parse_method,
    project,
    select,
)
from .solver import (
    AnnealSchedule,
    SolveResult,
    backend_solve,
    list_backends,
    solve_exhaustive,
    solve_sa,
)
from .stats import (
    Measure,
    ScoreSet,
    anova_f,
    chi_squared,
    mutual_information,
    score_dataset,
    spearman,
    target_scores,
)
from .synthetic import make_planted_classification, make_synthetic_regression

__version__ = "0.1.0"

__all__ = [
    "AlphaSearchConfig",
    "AlphaSearchResult",
    "AnnealSchedule",
    "CLASSIFICATION",
    "ColumnKind",
    "Dataset",
    "DecisionTreeRegressor",
    "EvaluationReport",
    "FoldPlan",
    "KnnClassifier",
    "KnnRegressor",
    "LogisticRegression",
    "Measure",
    "OriginalMethod",
    "QfsMethod",
    "QuboInstance",
    "QubofsError",
    "REGRESSION",
    "ScoreSet",
    "Selection",
    "SolveResult",
    "TopKMethod",
    "accuracy",
    "active_impl",
    "anova_f",
    "backend_solve",
    "build_qubo",
    "chi_squared",
    "error_rate",
    "f1_score",
    "fit_predict",
    "list_backends",
    "load_csv",
    "make_folds",
    "make_planted_classification",
    "make_synthetic_regression",
    "mutual_information",
    "parse_method",
    "parse_model",
    "probe_alpha",
    "project",
    "render_report",
    "rmse",
    "run_benchmark",
    "score_dataset",
    "search_alpha",
    "select",
    "solve_exhaustive",
    "solve_sa",
    "spearman",
    "split",
    "target_scores",
    "write_csv",
]
