"""Association measures between columns and dataset-level score assembly.

Four measures are supported: absolute Spearman rank correlation, plug-in
mutual information in nats, the chi-squared statistic, and the one-way
ANOVA F statistic. Spearman and mutual information apply to any column
pairing and drive both feature importance and pairwise redundancy; the
chi-squared and ANOVA measures are classical feature-vs-target selectors
only and are rejected for redundancy use.
"""

from __future__ import annotations

import hashlib
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .dataset import CLASSIFICATION, ColumnKind, Dataset
from .errors import (
    ConstantColumnError,
    DegenerateInputError,
    LengthMismatchError,
    MeasureNotApplicableError,
    NonFiniteInputError,
    SingleGroupError,
    ZeroExpectedCellError,
)

#: Default bin count for equal-frequency discretization of continuous columns.
DEFAULT_BINS = 10

SCHEMA_VERSION = 1


class Measure(str, Enum):
    SPEARMAN_ABS = "spearman"
    MUTUAL_INFORMATION = "mi"
    CHI_SQUARED = "chi2"
    ANOVA_F = "anova"


#: Measures valid for both importance and pairwise redundancy.
PAIRWISE_MEASURES = (Measure.SPEARMAN_ABS, Measure.MUTUAL_INFORMATION)


def _as_column(v, name="column") -> np.ndarray:
    arr = np.asarray(v, dtype=np.float64)
    if arr.ndim != 1 or arr.shape[0] < 1:
        raise NonFiniteInputError(f"{name} must be a non-empty 1-d array")
    if not np.all(np.isfinite(arr)):
        raise NonFiniteInputError(f"{name} contains non-finite values")
    return arr


def _check_lengths(x: np.ndarray, y: np.ndarray) -> None:
    if x.shape[0] != y.shape[0]:
        raise LengthMismatchError(f"column lengths differ: {x.shape[0]} vs {y.shape[0]}")


def _fsum(values) -> float:
    # Compensated summation keeps cell accumulations exact for large N.
    return math.fsum(values)


# ---------------------------------------------------------------- ranking


def rank_transform(v) -> np.ndarray:
    """Average ranks in [1, N]; ties receive the mean of the ranks they span."""
    v = _as_column(v)
    n = v.shape[0]
    order = np.argsort(v, kind="stable")
    sv = v[order]
    boundaries = np.flatnonzero(np.diff(sv) != 0.0) + 1
    starts = np.concatenate(([0], boundaries))
    ends = np.concatenate((boundaries, [n]))
    # Run occupying sorted positions [s, e) gets the mean of ranks s+1 .. e.
    averages = (starts + ends + 1) / 2.0
    ranks = np.empty(n, dtype=np.float64)
    ranks[order] = np.repeat(averages, ends - starts)
    return ranks


def spearman(x, y) -> float:
    """Spearman correlation: Pearson correlation of the rank transforms."""
    x = _as_column(x, "x")
    y = _as_column(y, "y")
    _check_lengths(x, y)
    if x.shape[0] < 2:
        raise ConstantColumnError("need at least 2 records for a correlation")
    rx = rank_transform(x)
    ry = rank_transform(y)
    # Perfectly monotone pairs have identical (or mirror) rank vectors;
    # answer exactly instead of through the rounded product form.
    if np.array_equal(rx, ry):
        if np.all(rx == rx[0]):
            raise ConstantColumnError("rank variance is zero (constant column)")
        return 1.0
    if np.array_equal(rx + ry, np.full_like(rx, x.shape[0] + 1.0)):
        return -1.0
    dx = rx - rx.mean()
    dy = ry - ry.mean()
    sx = math.sqrt(float(dx @ dx))
    sy = math.sqrt(float(dy @ dy))
    if sx == 0.0 or sy == 0.0:
        raise ConstantColumnError("rank variance is zero (constant column)")
    r = float(dx @ dy) / (sx * sy)
    return min(1.0, max(-1.0, r))


# ---------------------------------------------------------- discretization


def quantile_bin(v, bins: int) -> np.ndarray:
    """Equal-frequency bin codes in [0, bins); skewed data may leave some
    bins empty when quantile edges collide."""
    v = _as_column(v)
    if bins < 2:
        raise DegenerateInputError(f"bins must be >= 2, got {bins}")
    edges = np.quantile(v, np.linspace(0.0, 1.0, bins + 1))
    return np.searchsorted(edges[1:-1], v, side="right").astype(np.int64)


def _looks_discrete(v: np.ndarray) -> bool:
    return bool(np.all(v == np.floor(v)))


def _codes(v: np.ndarray, discrete: bool | None, bins: int) -> np.ndarray:
    if discrete is None:
        discrete = _looks_discrete(v)
    if discrete:
        _, codes = np.unique(v, return_inverse=True)
        return codes.astype(np.int64)
    return quantile_bin(v, bins)


# -------------------------------------------------------------- measures


def mutual_information(
    x,
    y,
    bins: int = DEFAULT_BINS,
    x_discrete: bool | None = None,
    y_discrete: bool | None = None,
) -> float:
    """Plug-in mutual information in nats from empirical joint frequencies.

    Continuous columns are quantile-binned first; integral-valued columns
    are used as-is unless ``*_discrete`` says otherwise. Cells with zero
    joint frequency contribute 0.
    """
    x = _as_column(x, "x")
    y = _as_column(y, "y")
    _check_lengths(x, y)
    cx = _codes(x, x_discrete, bins)
    cy = _codes(y, y_discrete, bins)
    n = x.shape[0]
    joint = np.zeros((int(cx.max()) + 1, int(cy.max()) + 1), dtype=np.float64)
    np.add.at(joint, (cx, cy), 1.0)
    p = joint / n
    px = p.sum(axis=1)
    py = p.sum(axis=0)
    rows, cols = np.nonzero(p)
    terms = p[rows, cols] * np.log(p[rows, cols] / (px[rows] * py[cols]))
    return _fsum(terms.tolist())


def entropy(x, bins: int = DEFAULT_BINS, discrete: bool | None = None) -> float:
    """Plug-in entropy in nats of a (possibly binned) column."""
    x = _as_column(x, "x")
    codes = _codes(x, discrete, bins)
    counts = np.bincount(codes).astype(np.float64)
    p = counts[counts > 0] / x.shape[0]
    return -_fsum((p * np.log(p)).tolist())


def contingency_table(cx: np.ndarray, cy: np.ndarray) -> np.ndarray:
    table = np.zeros((int(cx.max()) + 1, int(cy.max()) + 1), dtype=np.float64)
    np.add.at(table, (cx, cy), 1.0)
    return table


def chi_squared(
    x,
    y,
    bins: int = DEFAULT_BINS,
    x_discrete: bool | None = None,
    y_discrete: bool | None = None,
    x_levels: int | None = None,
    y_levels: int | None = None,
) -> float:
    """Chi-squared statistic over the contingency table of two discrete
    columns; continuous inputs are quantile-binned first.

    ``x_levels``/``y_levels`` widen the table to a fixed category universe;
    a level absent from the data then yields a zero expected count, which
    is an error.
    """
    x = _as_column(x, "x")
    y = _as_column(y, "y")
    _check_lengths(x, y)
    cx = _codes(x, x_discrete, bins)
    cy = _codes(y, y_discrete, bins)
    observed = contingency_table(cx, cy)
    if x_levels is not None and x_levels > observed.shape[0]:
        observed = np.vstack([observed, np.zeros((x_levels - observed.shape[0], observed.shape[1]))])
    if y_levels is not None and y_levels > observed.shape[1]:
        observed = np.hstack([observed, np.zeros((observed.shape[0], y_levels - observed.shape[1]))])
    row = observed.sum(axis=1)
    col = observed.sum(axis=0)
    if np.any(row == 0.0) or np.any(col == 0.0):
        raise ZeroExpectedCellError("a contingency marginal is zero, expected counts undefined")
    expected = np.outer(row, col) / observed.sum()
    cells = ((observed - expected) ** 2 / expected).ravel()
    return _fsum(cells.tolist())


def anova_f(x, y) -> float:
    """One-way ANOVA F statistic (SSB/(K-1)) / (SSW/(N-K)).

    ``x`` holds the measurements, ``y`` the group labels. Returns +inf when
    groups separate with zero within-group spread.
    """
    x = _as_column(x, "x")
    y = _as_column(y, "y")
    _check_lengths(x, y)
    if not _looks_discrete(y):
        raise DegenerateInputError("group column must hold integral labels")
    labels = np.unique(y)
    k = labels.shape[0]
    n = x.shape[0]
    if k < 2:
        raise SingleGroupError(f"need >= 2 groups, got {k}")
    if n <= k:
        raise DegenerateInputError(f"need more records ({n}) than groups ({k})")
    grand = x.mean()
    ssb_terms = []
    ssw_terms = []
    for lab in labels:
        member = x[y == lab]
        mean = member.mean()
        ssb_terms.append(member.shape[0] * (mean - grand) ** 2)
        dev = member - mean
        ssw_terms.append(float(dev @ dev))
    ssb = _fsum(ssb_terms)
    ssw = _fsum(ssw_terms)
    if ssw == 0.0:
        if ssb == 0.0:
            raise DegenerateInputError("both between- and within-group variance are zero")
        return math.inf
    return (ssb / (k - 1)) / (ssw / (n - k))


# ------------------------------------------------------------- score sets


@dataclass(frozen=True)
class ScoreSet:
    """Importance vector I and redundancy matrix R for one measure.

    ``redundancy`` is symmetric with a zero diagonal; all entries are
    finite and nonnegative.
    """

    importance: np.ndarray
    redundancy: np.ndarray
    measure: Measure
    bin_count: int

    def __post_init__(self):
        imp = np.ascontiguousarray(self.importance, dtype=np.float64)
        red = np.ascontiguousarray(self.redundancy, dtype=np.float64)
        imp.setflags(write=False)
        red.setflags(write=False)
        object.__setattr__(self, "importance", imp)
        object.__setattr__(self, "redundancy", red)
        n = imp.shape[0]
        if imp.ndim != 1 or red.shape != (n, n):
            raise DegenerateInputError("importance/redundancy shapes disagree")
        if not (np.all(np.isfinite(imp)) and np.all(np.isfinite(red))):
            raise NonFiniteInputError("score entries must be finite")
        if np.any(imp < 0.0) or np.any(red < 0.0):
            raise DegenerateInputError("score entries must be nonnegative")
        if np.any(red != red.T):
            raise DegenerateInputError("redundancy matrix must be symmetric")
        if np.any(np.diag(red) != 0.0):
            raise DegenerateInputError("redundancy diagonal must be zero")

    @property
    def n_features(self) -> int:
        return int(self.importance.shape[0])

    def to_json_dict(self) -> dict:
        n = self.n_features
        iu, ju = np.triu_indices(n, k=1)
        return {
            "schema_version": SCHEMA_VERSION,
            "kind": "score_set",
            "measure": self.measure.value,
            "bin_count": int(self.bin_count),
            "n_features": n,
            "importance": [float(v) for v in self.importance],
            "redundancy_upper": [float(v) for v in self.redundancy[iu, ju]],
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "ScoreSet":
        if d.get("kind") != "score_set":
            raise DegenerateInputError(f"not a score_set payload: kind={d.get('kind')!r}")
        n = int(d["n_features"])
        importance = np.asarray(d["importance"], dtype=np.float64)
        upper = np.asarray(d["redundancy_upper"], dtype=np.float64)
        if upper.shape[0] != n * (n - 1) // 2:
            raise DegenerateInputError("redundancy_upper has wrong length")
        red = np.zeros((n, n), dtype=np.float64)
        iu, ju = np.triu_indices(n, k=1)
        red[iu, ju] = upper
        red[ju, iu] = upper
        return cls(
            importance=importance,
            redundancy=red,
            measure=Measure(d["measure"]),
            bin_count=int(d["bin_count"]),
        )

    def content_hash(self) -> str:
        payload = json.dumps(self.to_json_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()


def _clamp_score(value: float, what: str) -> float:
    if value < 0.0:
        if value < -1e-9:
            raise DegenerateInputError(f"{what} is negative beyond tolerance: {value!r}")
        return 0.0
    return value


def _pair_score(ds: Dataset, measure: Measure, bins: int, i: int, j: int) -> float:
    xi = ds.feature(i)
    xj = ds.feature(j)
    di = ds.feature_kinds[i] is not ColumnKind.CONTINUOUS
    dj = ds.feature_kinds[j] is not ColumnKind.CONTINUOUS
    if measure is Measure.SPEARMAN_ABS:
        return abs(spearman(xi, xj))
    return _clamp_score(
        mutual_information(xi, xj, bins=bins, x_discrete=di, y_discrete=dj),
        f"redundancy ({i}, {j})",
    )


def target_scores(ds: Dataset, measure: Measure, bins: int = DEFAULT_BINS) -> np.ndarray:
    """Importance of each feature against the target for any measure.

    The chi-squared measure bins continuous columns first; the ANOVA
    measure requires continuous features and a classification target.
    """
    y = ds.y
    y_discrete = ds.task == CLASSIFICATION
    out = np.empty(ds.n_features, dtype=np.float64)
    for i in range(ds.n_features):
        x = ds.feature(i)
        x_discrete = ds.feature_kinds[i] is not ColumnKind.CONTINUOUS
        try:
            if measure is Measure.SPEARMAN_ABS:
                value = abs(spearman(x, y))
            elif measure is Measure.MUTUAL_INFORMATION:
                value = _clamp_score(
                    mutual_information(x, y, bins=bins, x_discrete=x_discrete, y_discrete=y_discrete),
                    f"importance ({i})",
                )
            elif measure is Measure.CHI_SQUARED:
                value = chi_squared(x, y, bins=bins, x_discrete=x_discrete, y_discrete=y_discrete)
            elif measure is Measure.ANOVA_F:
                if x_discrete:
                    raise MeasureNotApplicableError(
                        f"anova importance needs a continuous feature, {ds.feature_names[i]!r} is not"
                    )
                if not y_discrete:
                    raise MeasureNotApplicableError("anova importance needs a classification target")
                value = anova_f(x, y)
            else:  # pragma: no cover - exhaustive enum
                raise MeasureNotApplicableError(f"unknown measure {measure!r}")
        except MeasureNotApplicableError:
            raise
        except (ConstantColumnError, DegenerateInputError, SingleGroupError, ZeroExpectedCellError) as exc:
            raise type(exc)(f"importance of feature {i} ({ds.feature_names[i]!r}): {exc}") from exc
        out[i] = value
    return out


def score_dataset(
    ds: Dataset,
    measure: Measure,
    bins: int = DEFAULT_BINS,
    threads: int = 1,
) -> ScoreSet:
    """Assemble the full ScoreSet: importance per feature plus the symmetric
    redundancy matrix over all feature pairs.

    Only the Spearman and mutual-information measures define pairwise
    redundancy; the classical selectors are importance-only.
    """
    if measure not in PAIRWISE_MEASURES:
        raise MeasureNotApplicableError(
            f"measure {measure.value!r} is importance-only and defines no redundancy matrix"
        )
    importance = target_scores(ds, measure, bins=bins)
    n = ds.n_features
    redundancy = np.zeros((n, n), dtype=np.float64)
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]

    def fill(pair):
        i, j = pair
        try:
            return i, j, _pair_score(ds, measure, bins, i, j)
        except (ConstantColumnError, DegenerateInputError) as exc:
            raise type(exc)(f"redundancy cell ({i}, {j}): {exc}") from exc

    if threads > 1 and len(pairs) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(fill, pairs))
    else:
        results = [fill(p) for p in pairs]
    for i, j, value in results:
        redundancy[i, j] = value
        redundancy[j, i] = value
    return ScoreSet(importance=importance, redundancy=redundancy, measure=measure, bin_count=bins)
