"""Synthetic datasets with known ground truth.

The planted classification fixture is the redundancy-avoidance testbed: a
few informative feature groups, each an exact duplicate set, plus pure
noise. A selector that ignores redundancy burns its budget on duplicates
of the strongest group; one that accounts for it covers more groups.
"""

from __future__ import annotations

import numpy as np

from .dataset import CLASSIFICATION, REGRESSION, ColumnKind, Dataset
from .errors import DegenerateInputError


def make_planted_classification(
    seed: int,
    n_groups: int = 5,
    dup_per_group: int = 3,
    n_noise: int = 30,
    n_records: int = 600,
    shift_max: float = 2.0,
    shift_min: float = 0.7,
):
    """Binary-target dataset with duplicated informative feature groups.

    Group g contributes ``dup_per_group`` identical copies of one Gaussian
    feature whose class-1 mean is shifted by an amount decreasing from
    ``shift_max`` to ``shift_min`` across groups; ``n_noise`` independent
    Gaussian features carry no signal. Returns (dataset, groups) where
    groups[j] is the group id of feature j, or None for noise columns.
    """
    if n_records % 2 != 0:
        raise DegenerateInputError("n_records must be even for a balanced target")
    rng = np.random.default_rng(seed)
    y = rng.permutation(np.repeat([0.0, 1.0], n_records // 2))
    shifts = np.linspace(shift_max, shift_min, n_groups)
    columns = []
    names = []
    groups: list[int | None] = []
    for g in range(n_groups):
        base = rng.normal(size=n_records) + shifts[g] * y
        for d in range(dup_per_group):
            columns.append(base)
            names.append(f"g{g}_d{d}")
            groups.append(g)
    for j in range(n_noise):
        columns.append(rng.normal(size=n_records))
        names.append(f"noise{j}")
        groups.append(None)
    X = np.column_stack(columns)
    ds = Dataset(
        feature_names=tuple(names),
        feature_kinds=(ColumnKind.CONTINUOUS,) * X.shape[1],
        X=X,
        y=y,
        target_name="label",
        task=CLASSIFICATION,
        num_classes=2,
        target_categories=("0", "1"),
    )
    return ds, tuple(groups)


def groups_covered(groups, feature_indices) -> int:
    """How many distinct informative groups a selection touches."""
    return len({groups[i] for i in feature_indices if groups[i] is not None})


def make_synthetic_regression(
    seed: int,
    n_features: int = 12,
    n_informative: int = 4,
    n_records: int = 300,
    noise: float = 0.5,
) -> Dataset:
    """Linear-target regression dataset; the first ``n_informative``
    features carry decreasing weights, the rest are distractors."""
    if not (1 <= n_informative <= n_features):
        raise DegenerateInputError("need 1 <= n_informative <= n_features")
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(n_records, n_features))
    weights = np.zeros(n_features)
    weights[:n_informative] = np.linspace(2.0, 0.5, n_informative)
    y = X @ weights + noise * rng.normal(size=n_records)
    return Dataset(
        feature_names=tuple(f"x{j}" for j in range(n_features)),
        feature_kinds=(ColumnKind.CONTINUOUS,) * n_features,
        X=X,
        y=y,
        target_name="target",
        task=REGRESSION,
    )
