"""Lightweight predictors trained on selected features.

Four small models cover the benchmark: two classifiers (k-nearest
neighbors and logistic regression) and two regressors (k-nearest
neighbors and a variance-reduction decision tree). Each is a frozen
hyperparameter record; fitting happens inside ``fit_predict`` so a model
value can be reused across folds without hidden state.

Distances are Euclidean on standardized features, with the
standardization statistics fit on the training records only.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .dataset import CLASSIFICATION, REGRESSION, Dataset
from .errors import DegenerateInputError, EmptyTrainError, SchemaMismatchError


@dataclass(frozen=True)
class KnnClassifier:
    k_neighbors: int = 5

    def __post_init__(self):
        if self.k_neighbors < 1:
            raise DegenerateInputError("k_neighbors must be positive")

    tag = "knn"
    label = "KNN"
    task = CLASSIFICATION


@dataclass(frozen=True)
class LogisticRegression:
    learning_rate: float = 0.1
    epochs: int = 500
    l2: float = 1e-4

    def __post_init__(self):
        if not self.learning_rate > 0.0:
            raise DegenerateInputError("learning_rate must be positive")
        if self.epochs < 1:
            raise DegenerateInputError("epochs must be positive")
        if self.l2 < 0.0:
            raise DegenerateInputError("l2 must be non-negative")

    tag = "logreg"
    label = "Logistic Regression"
    task = CLASSIFICATION


@dataclass(frozen=True)
class KnnRegressor:
    k_neighbors: int = 5

    def __post_init__(self):
        if self.k_neighbors < 1:
            raise DegenerateInputError("k_neighbors must be positive")

    tag = "knn-reg"
    label = "KNN Regressor"
    task = REGRESSION


@dataclass(frozen=True)
class DecisionTreeRegressor:
    max_depth: int = 8
    min_leaf: int = 5

    def __post_init__(self):
        if self.max_depth < 1:
            raise DegenerateInputError("max_depth must be positive")
        if self.min_leaf < 1:
            raise DegenerateInputError("min_leaf must be positive")

    tag = "tree-reg"
    label = "Decision Tree"
    task = REGRESSION


Model = Union[KnnClassifier, LogisticRegression, KnnRegressor, DecisionTreeRegressor]

MODEL_TAGS = {
    "knn": KnnClassifier,
    "logreg": LogisticRegression,
    "knn-reg": KnnRegressor,
    "tree-reg": DecisionTreeRegressor,
}


def parse_model(tag: str) -> Model:
    if tag not in MODEL_TAGS:
        known = ", ".join(sorted(MODEL_TAGS))
        raise DegenerateInputError(f"unknown model {tag!r}; expected one of {known}")
    return MODEL_TAGS[tag]()


def _check_schemas(model: Model, train: Dataset, test: Dataset) -> None:
    if train.n_records < 1:
        raise EmptyTrainError("training set has no records")
    if train.feature_names != test.feature_names:
        raise SchemaMismatchError(
            f"feature names differ: {train.feature_names} vs {test.feature_names}"
        )
    if train.feature_kinds != test.feature_kinds:
        raise SchemaMismatchError("feature kinds differ between train and test")
    if train.task != test.task or train.num_classes != test.num_classes:
        raise SchemaMismatchError("target schema differs between train and test")
    if train.task != model.task:
        raise SchemaMismatchError(
            f"{type(model).__name__} requires a {model.task} target, got {train.task}"
        )


def standardize_stats(X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Per-feature mean and scale from training data; constant features get scale 1."""
    mu = X.mean(axis=0)
    sd = X.std(axis=0)
    sd = np.where(sd == 0.0, 1.0, sd)
    return mu, sd


def _neighbor_order(train_z: np.ndarray, test_z: np.ndarray) -> np.ndarray:
    # (test, train) squared distances; stable sort breaks ties by train index
    d2 = ((test_z[:, None, :] - train_z[None, :, :]) ** 2).sum(axis=2)
    return np.argsort(d2, axis=1, kind="stable")


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def _fit_logistic_binary(
    Z: np.ndarray, target: np.ndarray, model: LogisticRegression
) -> tuple[np.ndarray, float]:
    n = Z.shape[0]
    w = np.zeros(Z.shape[1])
    b = 0.0
    for _ in range(model.epochs):
        resid = _sigmoid(Z @ w + b) - target
        w -= model.learning_rate * (Z.T @ resid / n + model.l2 * w)
        b -= model.learning_rate * float(resid.mean())
    return w, b


class _TreeNode:
    __slots__ = ("value", "feature", "threshold", "left", "right")

    def __init__(self, value: float):
        self.value = value
        self.feature = -1
        self.threshold = 0.0
        self.left = None
        self.right = None


def _best_split(X: np.ndarray, y: np.ndarray, min_leaf: int):
    """Return (sse, feature, threshold) of the best split, or None."""
    n = y.shape[0]
    if n < 2 * min_leaf:
        return None
    best = None
    parent_sse = float(((y - y.mean()) ** 2).sum())
    for j in range(X.shape[1]):
        order = np.argsort(X[:, j], kind="stable")
        xs = X[order, j]
        ys = y[order]
        left_n = np.arange(1, n)
        s1 = np.cumsum(ys)[:-1]
        s2 = np.cumsum(ys**2)[:-1]
        total1 = ys.sum()
        total2 = float((ys**2).sum())
        sse = (s2 - s1**2 / left_n) + (
            (total2 - s2) - (total1 - s1) ** 2 / (n - left_n)
        )
        valid = (xs[1:] != xs[:-1]) & (left_n >= min_leaf) & (n - left_n >= min_leaf)
        if not valid.any():
            continue
        sse = np.where(valid, sse, np.inf)
        pos = int(np.argmin(sse))
        if sse[pos] < parent_sse - 1e-12 and (best is None or sse[pos] < best[0]):
            best = (float(sse[pos]), j, float((xs[pos] + xs[pos + 1]) / 2.0))
    return best


def _grow_tree(X: np.ndarray, y: np.ndarray, depth: int, model: DecisionTreeRegressor):
    node = _TreeNode(float(y.mean()))
    if depth >= model.max_depth:
        return node
    split = _best_split(X, y, model.min_leaf)
    if split is None:
        return node
    _, j, threshold = split
    mask = X[:, j] <= threshold
    node.feature = j
    node.threshold = threshold
    node.left = _grow_tree(X[mask], y[mask], depth + 1, model)
    node.right = _grow_tree(X[~mask], y[~mask], depth + 1, model)
    return node


def _tree_predict(node: _TreeNode, row: np.ndarray) -> float:
    while node.feature >= 0:
        node = node.left if row[node.feature] <= node.threshold else node.right
    return node.value


def fit_predict(model: Model, train: Dataset, test: Dataset) -> np.ndarray:
    """Fit ``model`` on ``train`` and return predictions for ``test``.

    Classifiers return class codes; regressors return real values. All
    fitting statistics, including standardization, come from ``train``.
    """
    _check_schemas(model, train, test)
    if isinstance(model, (KnnClassifier, KnnRegressor)):
        if model.k_neighbors > train.n_records:
            raise DegenerateInputError(
                f"k_neighbors={model.k_neighbors} exceeds {train.n_records} training records"
            )
        mu, sd = standardize_stats(train.X)
        order = _neighbor_order((train.X - mu) / sd, (test.X - mu) / sd)
        neighbors = order[:, : model.k_neighbors]
        if isinstance(model, KnnRegressor):
            return train.y[neighbors].mean(axis=1)
        labels = train.y.astype(np.int64)[neighbors]
        preds = np.empty(test.n_records, dtype=np.float64)
        for i in range(test.n_records):
            counts = np.bincount(labels[i], minlength=train.num_classes)
            preds[i] = float(np.argmax(counts))
        return preds
    if isinstance(model, LogisticRegression):
        mu, sd = standardize_stats(train.X)
        Z = (train.X - mu) / sd
        Zt = (test.X - mu) / sd
        if train.num_classes == 2:
            w, b = _fit_logistic_binary(Z, train.y, model)
            return (Zt @ w + b > 0.0).astype(np.float64)
        scores = np.empty((test.n_records, train.num_classes))
        for c in range(train.num_classes):
            w, b = _fit_logistic_binary(Z, (train.y == c).astype(np.float64), model)
            scores[:, c] = Zt @ w + b
        return np.argmax(scores, axis=1).astype(np.float64)
    if isinstance(model, DecisionTreeRegressor):
        root = _grow_tree(train.X, train.y, 0, model)
        return np.array([_tree_predict(root, row) for row in test.X])
    raise DegenerateInputError(f"unsupported model {model!r}")
