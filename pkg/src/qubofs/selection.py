"""Uniform interface over the feature-selection methods.

QFS runs the full score -> alpha-search -> solve pipeline; the top-k
baselines rank features by a single feature-vs-target statistic and keep
the k best; Original passes every feature through.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .alpha_search import AlphaSearchConfig, AlphaSearchResult, probe_seed, search_alpha
from .dataset import Dataset
from .errors import (
    CardinalityMissError,
    DegenerateInputError,
    IndexOutOfRangeError,
    KTargetOutOfRangeError,
)
from .stats import (
    DEFAULT_BINS,
    Measure,
    PAIRWISE_MEASURES,
    SCHEMA_VERSION,
    score_dataset,
    target_scores,
)


@dataclass(frozen=True)
class QfsMethod:
    """QUBO-based selection with a pairwise measure and a solver backend."""

    measure: Measure = Measure.MUTUAL_INFORMATION
    backend: str = "auto"

    def __post_init__(self):
        if self.measure not in PAIRWISE_MEASURES:
            raise DegenerateInputError(
                f"QFS needs a pairwise measure, got {self.measure.value!r}"
            )

    @property
    def tag(self) -> str:
        return f"qfs-{self.measure.value}"

    @property
    def label(self) -> str:
        name = "MI" if self.measure is Measure.MUTUAL_INFORMATION else "Spearman"
        return f"QFS {name}"


@dataclass(frozen=True)
class TopKMethod:
    """Classical baseline: k largest feature-vs-target statistics."""

    measure: Measure = Measure.ANOVA_F

    @property
    def tag(self) -> str:
        return f"topk-{self.measure.value}"

    @property
    def label(self) -> str:
        if self.measure is Measure.ANOVA_F:
            return "F Test"
        if self.measure is Measure.CHI_SQUARED:
            return "Chi-Squared"
        return f"Top-k {self.measure.value}"


@dataclass(frozen=True)
class OriginalMethod:
    """Pass-through baseline keeping every feature."""

    @property
    def tag(self) -> str:
        return "original"

    @property
    def label(self) -> str:
        return "Original Data"


SelectionMethod = QfsMethod | TopKMethod | OriginalMethod

METHOD_TAGS = {
    "qfs-mi": QfsMethod(Measure.MUTUAL_INFORMATION),
    "qfs-spearman": QfsMethod(Measure.SPEARMAN_ABS),
    "topk-anova": TopKMethod(Measure.ANOVA_F),
    "topk-chi2": TopKMethod(Measure.CHI_SQUARED),
    "original": OriginalMethod(),
}


def parse_method(tag: str) -> SelectionMethod:
    try:
        return METHOD_TAGS[tag]
    except KeyError:
        raise DegenerateInputError(
            f"unknown method {tag!r}, have {sorted(METHOD_TAGS)}"
        ) from None


@dataclass(frozen=True)
class Selection:
    """Chosen feature indices plus how they were chosen."""

    method: SelectionMethod
    feature_indices: tuple[int, ...]
    k: int
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        idx = tuple(int(i) for i in self.feature_indices)
        if list(idx) != sorted(set(idx)):
            raise DegenerateInputError("feature indices must be sorted and unique")
        object.__setattr__(self, "feature_indices", idx)
        if len(idx) != self.k:
            raise DegenerateInputError(
                f"selection size {len(idx)} does not match k={self.k}"
            )

    def to_json_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "kind": "selection",
            "method": self.method.tag,
            "label": self.method.label,
            "feature_indices": list(self.feature_indices),
            "k": int(self.k),
            "metadata": self.metadata,
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "Selection":
        if d.get("kind") != "selection":
            raise DegenerateInputError(f"not a selection payload: kind={d.get('kind')!r}")
        return cls(
            method=parse_method(d["method"]),
            feature_indices=tuple(int(i) for i in d["feature_indices"]),
            k=int(d["k"]),
            metadata=dict(d.get("metadata", {})),
        )


#: Accept non-exact QFS cardinalities within this fraction of the target.
DEFAULT_CARDINALITY_TOLERANCE = 0.1


def _select_topk(ds: Dataset, method: TopKMethod, k: int, bins: int) -> Selection:
    scores = target_scores(ds, method.measure, bins=bins)
    # Stable argsort on the negated scores: ties go to the smaller index.
    order = np.argsort(-scores, kind="stable")
    picked = sorted(int(i) for i in order[:k])
    return Selection(
        method=method,
        feature_indices=tuple(picked),
        k=k,
        metadata={"measure": method.measure.value, "bins": int(bins)},
    )


def _winning_probe_index(result: AlphaSearchResult) -> int:
    for idx, (alpha, _) in enumerate(result.trace):
        if alpha == result.alpha:
            return idx
    raise DegenerateInputError("alpha search result lacks its winning probe")


def _select_qfs(
    ds: Dataset,
    method: QfsMethod,
    k: int,
    seed: int,
    bins: int,
    cardinality_tolerance: float,
    max_iters: int,
    solver_params: dict | None,
    threads: int,
) -> Selection:
    scores = score_dataset(ds, method.measure, bins=bins, threads=threads)
    params = dict(solver_params or {})
    params.setdefault("seed", seed)
    result = search_alpha(
        scores,
        AlphaSearchConfig(k_target=k, max_iters=max_iters, backend=method.backend, params=params),
    )
    if not result.exact:
        miss = abs(result.k_achieved - k)
        if miss > cardinality_tolerance * k:
            raise CardinalityMissError(
                f"alpha search reached k={result.k_achieved}, outside "
                f"{cardinality_tolerance:.0%} of target {k}; trace={result.trace}"
            )
    return Selection(
        method=method,
        feature_indices=tuple(result.selected_indices()),
        k=result.k_achieved,
        metadata={
            "measure": method.measure.value,
            "bins": int(bins),
            "backend": method.backend,
            "k_target": int(k),
            "alpha": float(result.alpha),
            "exact": bool(result.exact),
            "trace": [[float(a), int(c)] for a, c in result.trace],
            "non_monotone_observed": bool(result.non_monotone_observed),
            "score_hash": scores.content_hash(),
            "seed": int(seed),
            # Seed the winning probe actually solved with, so the solve
            # stage can be replayed file-by-file from the score artifact.
            "probe_seed": int(
                probe_seed(params["seed"], _winning_probe_index(result))
            ),
        },
    )


def select(
    ds: Dataset,
    method: SelectionMethod,
    k: int,
    seed: int,
    bins: int = DEFAULT_BINS,
    cardinality_tolerance: float = DEFAULT_CARDINALITY_TOLERANCE,
    max_iters: int = 32,
    solver_params: dict | None = None,
    threads: int = 1,
) -> Selection:
    """Run one selection method; k is ignored for the Original baseline."""
    if isinstance(method, OriginalMethod):
        return Selection(
            method=method,
            feature_indices=tuple(range(ds.n_features)),
            k=ds.n_features,
            metadata={},
        )
    if not (1 <= k <= ds.n_features):
        raise KTargetOutOfRangeError(f"k must be in [1, {ds.n_features}], got {k}")
    if isinstance(method, TopKMethod):
        return _select_topk(ds, method, k, bins)
    return _select_qfs(
        ds, method, k, seed, bins, cardinality_tolerance, max_iters, solver_params, threads
    )


def project(ds: Dataset, sel: Selection) -> Dataset:
    """Dataset restricted to the selected feature columns."""
    for i in sel.feature_indices:
        if not (0 <= i < ds.n_features):
            raise IndexOutOfRangeError(
                f"feature index {i} out of range for {ds.n_features} features"
            )
    return ds.take_features(sel.feature_indices)
