import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qubofs.dataset import CLASSIFICATION, REGRESSION, ColumnKind, Dataset
from qubofs.errors import (
    ConstantColumnError,
    DegenerateInputError,
    LengthMismatchError,
    MeasureNotApplicableError,
    NonFiniteInputError,
    SingleGroupError,
    ZeroExpectedCellError,
)
from qubofs.stats import (
    Measure,
    ScoreSet,
    anova_f,
    chi_squared,
    entropy,
    mutual_information,
    quantile_bin,
    rank_transform,
    score_dataset,
    spearman,
    target_scores,
)

scipy_stats = pytest.importorskip("scipy.stats")


# ------------------------------------------------------------- oracles


def naive_ranks(values):
    """O(N^2) average ranks: rank = #smaller + (#equal + 1) / 2."""
    out = []
    for v in values:
        smaller = sum(1 for w in values if w < v)
        equal = sum(1 for w in values if w == v)
        out.append(smaller + (equal + 1) / 2)
    return out


def naive_mi(table):
    """Direct plug-in summation over a joint count table."""
    table = [[float(c) for c in row] for row in table]
    n = sum(sum(row) for row in table)
    row_sums = [sum(row) for row in table]
    col_sums = [sum(row[j] for row in table) for j in range(len(table[0]))]
    total = 0.0
    for i, row in enumerate(table):
        for j, count in enumerate(row):
            if count == 0:
                continue
            pxy = count / n
            total += pxy * math.log(pxy / ((row_sums[i] / n) * (col_sums[j] / n)))
    return total


def naive_chi2(table):
    table = [[float(c) for c in row] for row in table]
    n = sum(sum(row) for row in table)
    row_sums = [sum(row) for row in table]
    col_sums = [sum(row[j] for row in table) for j in range(len(table[0]))]
    total = 0.0
    for i, row in enumerate(table):
        for j, observed in enumerate(row):
            expected = row_sums[i] * col_sums[j] / n
            total += (observed - expected) ** 2 / expected
    return total


def columns_from_table(table):
    """Expand a joint count table into paired code columns."""
    xs, ys = [], []
    for i, row in enumerate(table):
        for j, count in enumerate(row):
            xs.extend([i] * int(count))
            ys.extend([j] * int(count))
    return np.array(xs, dtype=np.float64), np.array(ys, dtype=np.float64)


# -------------------------------------------------------------- ranking


class TestRankTransform:
    def test_sorted_input(self):
        np.testing.assert_array_equal(rank_transform([10, 20, 30]), [1, 2, 3])

    def test_tie_averaging(self):
        np.testing.assert_array_equal(rank_transform([5, 5, 7]), [1.5, 1.5, 3])

    def test_against_naive_oracle(self):
        v = [3, 1, 4, 1]
        np.testing.assert_array_equal(rank_transform(v), naive_ranks(v))
        np.testing.assert_array_equal(rank_transform(v), [3, 1.5, 4, 1.5])

    @given(
        st.lists(st.integers(min_value=-50, max_value=50), min_size=1, max_size=40)
    )
    @settings(max_examples=80, deadline=None)
    def test_matches_oracle_and_sums(self, values):
        ranks = rank_transform(values)
        np.testing.assert_allclose(ranks, naive_ranks(values), rtol=0, atol=1e-12)
        n = len(values)
        assert abs(ranks.sum() - n * (n + 1) / 2) < 1e-9
        assert ranks.min() >= 1.0 and ranks.max() <= n

    def test_non_finite_rejected(self):
        with pytest.raises(NonFiniteInputError):
            rank_transform([1.0, float("nan")])


class TestSpearman:
    def test_perfect_monotone(self):
        assert spearman([1, 2, 3, 4], [1, 2, 3, 4]) == 1.0

    def test_perfect_antitone(self):
        assert spearman([1, 2, 3, 4], [9, 7, 5, 3]) == -1.0

    def test_untied_closed_form(self):
        # 1 - 6 * sum(d^2) / (N (N^2 - 1)) = 1 - 12/60
        assert abs(spearman([1, 2, 3, 4], [1, 3, 2, 4]) - 0.8) < 1e-12

    def test_symmetry_and_scipy_agreement(self):
        rng = np.random.default_rng(11)
        for _ in range(20):
            x = rng.normal(size=25)
            y = rng.normal(size=25) + 0.5 * x
            ours = spearman(x, y)
            assert abs(ours - spearman(y, x)) < 1e-15
            reference = scipy_stats.spearmanr(x, y).statistic
            np.testing.assert_allclose(ours, reference, rtol=0, atol=1e-12)

    @given(st.lists(st.integers(min_value=0, max_value=10**6), min_size=3, max_size=30, unique=True))
    @settings(max_examples=60, deadline=None)
    def test_untied_formula_property(self, xs):
        rng = np.random.default_rng(len(xs))
        ys = rng.permutation(len(xs)).astype(float)
        x = np.array(xs, dtype=float)
        d = rank_transform(x) - rank_transform(ys)
        n = len(xs)
        closed = 1 - 6 * float(d @ d) / (n * (n * n - 1))
        got = spearman(x, ys)
        assert abs(got - closed) < 1e-9
        assert abs(got) <= 1 + 1e-12

    def test_constant_column(self):
        with pytest.raises(ConstantColumnError):
            spearman([1, 1, 1], [1, 2, 3])

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatchError):
            spearman([1, 2, 3], [1, 2])


# ------------------------------------------------------- discretization


class TestQuantileBin:
    def test_balanced_bins_on_distinct_values(self):
        rng = np.random.default_rng(0)
        v = rng.permutation(100).astype(float)
        codes = quantile_bin(v, 10)
        counts = np.bincount(codes, minlength=10)
        np.testing.assert_array_equal(counts, [10] * 10)

    def test_order_preserving(self):
        v = np.array([5.0, 1.0, 9.0, 3.0, 7.0, 2.0, 8.0, 4.0, 6.0, 0.0])
        codes = quantile_bin(v, 5)
        order = np.argsort(v)
        assert np.all(np.diff(codes[order]) >= 0)

    def test_bins_lower_bound(self):
        with pytest.raises(DegenerateInputError):
            quantile_bin([1.0, 2.0], 1)


# -------------------------------------------------------------- mi


class TestMutualInformation:
    def test_exact_independence_is_zero(self):
        x = np.array([0, 0, 1, 1] * 5, dtype=float)
        y = np.array([0, 1, 0, 1] * 5, dtype=float)
        assert mutual_information(x, y) == 0.0

    def test_identical_binary_is_ln2(self):
        x = np.array([0, 1] * 10, dtype=float)
        assert abs(mutual_information(x, x) - math.log(2)) < 1e-12

    def test_joint_table_oracle(self):
        table = [[4, 1], [1, 4]]
        x, y = columns_from_table(table)
        expected = naive_mi(table)
        assert abs(mutual_information(x, y) - expected) < 1e-12

    def test_symmetry_and_nonnegativity(self):
        rng = np.random.default_rng(3)
        for _ in range(15):
            x = rng.integers(0, 4, size=60).astype(float)
            y = rng.integers(0, 3, size=60).astype(float)
            a = mutual_information(x, y)
            b = mutual_information(y, x)
            assert abs(a - b) < 1e-12
            assert a >= -1e-12

    def test_self_mi_equals_entropy(self):
        rng = np.random.default_rng(4)
        x = rng.integers(0, 5, size=100).astype(float)
        assert abs(mutual_information(x, x) - entropy(x)) < 1e-12

    def test_continuous_columns_are_binned(self):
        rng = np.random.default_rng(5)
        x = rng.normal(size=200)
        y = x + rng.normal(scale=0.1, size=200)
        direct = mutual_information(x, y, bins=10)
        prebinned = mutual_information(
            quantile_bin(x, 10).astype(float), quantile_bin(y, 10).astype(float)
        )
        assert abs(direct - prebinned) < 1e-12
        assert direct > 1.0  # strongly dependent pair carries real information

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatchError):
            mutual_information([0.0, 1.0], [0.0, 1.0, 0.0])


# -------------------------------------------------------------- chi2


class TestChiSquared:
    def test_observed_equals_expected(self):
        x = np.array([0, 0, 1, 1], dtype=float)
        y = np.array([0, 1, 0, 1], dtype=float)
        assert chi_squared(x, y) == 0.0

    def test_perfect_association_equals_n(self):
        x = np.array([0] * 5 + [1] * 5, dtype=float)
        assert abs(chi_squared(x, x) - 10.0) < 1e-12

    def test_2x2_oracle(self):
        table = [[10, 20], [30, 40]]
        x, y = columns_from_table(table)
        expected = naive_chi2(table)
        assert abs(chi_squared(x, y) - expected) < 1e-12
        reference = scipy_stats.chi2_contingency(np.array(table), correction=False).statistic
        assert abs(chi_squared(x, y) - reference) < 1e-9

    def test_symmetry(self):
        rng = np.random.default_rng(6)
        x = rng.integers(0, 3, size=90).astype(float)
        y = rng.integers(0, 4, size=90).astype(float)
        assert abs(chi_squared(x, y) - chi_squared(y, x)) < 1e-9

    def test_zero_expected_cell_with_fixed_levels(self):
        x = np.array([0, 0, 1, 1], dtype=float)
        y = np.array([0, 1, 0, 1], dtype=float)
        with pytest.raises(ZeroExpectedCellError):
            chi_squared(x, y, x_levels=3)


# -------------------------------------------------------------- anova


class TestAnovaF:
    def test_equal_means_gives_zero(self):
        x = np.array([1.0, 3.0, 1.0, 3.0])
        y = np.array([0.0, 0.0, 1.0, 1.0])
        assert anova_f(x, y) == 0.0

    def test_two_group_fixture(self):
        x = np.array([1.0, 2.0, 3.0, 4.0, 5.0, 6.0])
        y = np.array([0.0, 0.0, 0.0, 1.0, 1.0, 1.0])
        # Direct SSB/SSW evaluation on the fixture.
        grand = x.mean()
        ssb = 3 * (2.0 - grand) ** 2 + 3 * (5.0 - grand) ** 2
        ssw = sum((v - 2.0) ** 2 for v in x[:3]) + sum((v - 5.0) ** 2 for v in x[3:])
        expected = (ssb / 1) / (ssw / 4)
        assert abs(anova_f(x, y) - expected) < 1e-12
        assert abs(anova_f(x, y) - 13.5) < 1e-12

    def test_scipy_agreement(self):
        rng = np.random.default_rng(7)
        x = rng.normal(size=60)
        y = rng.integers(0, 3, size=60).astype(float)
        x[y == 2] += 1.0
        groups = [x[y == g] for g in range(3)]
        reference = scipy_stats.f_oneway(*groups).statistic
        np.testing.assert_allclose(anova_f(x, y), reference, rtol=1e-10)

    def test_single_group(self):
        with pytest.raises(SingleGroupError):
            anova_f([1.0, 2.0, 3.0], [0.0, 0.0, 0.0])

    def test_affine_invariance(self):
        rng = np.random.default_rng(8)
        x = rng.normal(size=40)
        y = rng.integers(0, 2, size=40).astype(float)
        x[y == 1] += 0.8
        base = anova_f(x, y)
        np.testing.assert_allclose(anova_f(3.5 * x - 2.0, y), base, rtol=1e-9)

    def test_zero_within_variance_is_inf(self):
        x = np.array([1.0, 1.0, 2.0, 2.0])
        y = np.array([0.0, 0.0, 1.0, 1.0])
        assert anova_f(x, y) == math.inf

    def test_fully_degenerate(self):
        x = np.array([1.0, 1.0, 1.0, 1.0])
        y = np.array([0.0, 0.0, 1.0, 1.0])
        with pytest.raises(DegenerateInputError):
            anova_f(x, y)


# ---------------------------------------------------------- score sets


def make_dataset(X, task=CLASSIFICATION, y=None, kinds=None):
    n = X.shape[1]
    if y is None:
        y = np.arange(X.shape[0]) % 2
    return Dataset(
        feature_names=tuple(f"f{j}" for j in range(n)),
        feature_kinds=kinds or (ColumnKind.CONTINUOUS,) * n,
        X=np.asarray(X, dtype=np.float64),
        y=np.asarray(y, dtype=np.float64),
        target_name="y",
        task=task,
        num_classes=2 if task == CLASSIFICATION else None,
    )


class TestScoreDataset:
    def test_duplicate_feature_redundancy_is_entropy(self):
        rng = np.random.default_rng(9)
        col = rng.integers(0, 4, size=80).astype(float)
        X = np.column_stack([col, col, rng.integers(0, 4, size=80).astype(float)])
        ds = make_dataset(X, kinds=(ColumnKind.NOMINAL,) * 3)
        scores = score_dataset(ds, Measure.MUTUAL_INFORMATION)
        h = entropy(col)
        assert abs(scores.redundancy[0, 1] - h) < 1e-12
        assert scores.redundancy[0, 1] == scores.redundancy[0].max()

    def test_two_feature_symmetry(self):
        rng = np.random.default_rng(10)
        ds = make_dataset(rng.normal(size=(30, 2)))
        scores = score_dataset(ds, Measure.SPEARMAN_ABS)
        assert scores.redundancy[0, 1] == scores.redundancy[1, 0]
        assert scores.redundancy[0, 0] == 0.0

    def test_three_feature_composition(self):
        rng = np.random.default_rng(12)
        X = rng.normal(size=(50, 3))
        y = (X[:, 0] > 0).astype(float)
        ds = make_dataset(X, y=y)
        for measure in (Measure.SPEARMAN_ABS, Measure.MUTUAL_INFORMATION):
            scores = score_dataset(ds, measure, bins=8)
            for i in range(3):
                if measure is Measure.SPEARMAN_ABS:
                    want = abs(spearman(X[:, i], y))
                else:
                    want = mutual_information(X[:, i], y, bins=8, x_discrete=False, y_discrete=True)
                assert abs(scores.importance[i] - want) < 1e-12
            for i in range(3):
                for j in range(i + 1, 3):
                    if measure is Measure.SPEARMAN_ABS:
                        want = abs(spearman(X[:, i], X[:, j]))
                    else:
                        want = mutual_information(X[:, i], X[:, j], bins=8, x_discrete=False, y_discrete=False)
                    assert abs(scores.redundancy[i, j] - want) < 1e-12

    def test_invariants_on_random_datasets(self):
        rng = np.random.default_rng(13)
        for trial in range(5):
            X = rng.normal(size=(40, 4))
            ds = make_dataset(X)
            for measure in (Measure.SPEARMAN_ABS, Measure.MUTUAL_INFORMATION):
                s = score_dataset(ds, measure)
                assert np.all(np.isfinite(s.importance)) and np.all(s.importance >= 0)
                assert np.all(np.isfinite(s.redundancy)) and np.all(s.redundancy >= 0)
                np.testing.assert_array_equal(s.redundancy, s.redundancy.T)
                np.testing.assert_array_equal(np.diag(s.redundancy), np.zeros(4))

    def test_importance_only_measures_rejected(self):
        ds = make_dataset(np.random.default_rng(14).normal(size=(20, 2)))
        with pytest.raises(MeasureNotApplicableError):
            score_dataset(ds, Measure.CHI_SQUARED)
        with pytest.raises(MeasureNotApplicableError):
            score_dataset(ds, Measure.ANOVA_F)

    def test_threads_match_serial(self):
        rng = np.random.default_rng(15)
        ds = make_dataset(rng.normal(size=(35, 6)))
        serial = score_dataset(ds, Measure.MUTUAL_INFORMATION, threads=1)
        threaded = score_dataset(ds, Measure.MUTUAL_INFORMATION, threads=4)
        np.testing.assert_array_equal(serial.importance, threaded.importance)
        np.testing.assert_array_equal(serial.redundancy, threaded.redundancy)

    def test_json_round_trip_and_hash(self):
        rng = np.random.default_rng(16)
        ds = make_dataset(rng.normal(size=(30, 4)))
        scores = score_dataset(ds, Measure.SPEARMAN_ABS)
        back = ScoreSet.from_json_dict(scores.to_json_dict())
        np.testing.assert_array_equal(back.importance, scores.importance)
        np.testing.assert_array_equal(back.redundancy, scores.redundancy)
        assert back.measure == scores.measure
        assert back.content_hash() == scores.content_hash()
        other = score_dataset(ds, Measure.MUTUAL_INFORMATION)
        assert other.content_hash() != scores.content_hash()


class TestTargetScores:
    def test_matches_per_column_measures(self):
        rng = np.random.default_rng(17)
        X = rng.normal(size=(60, 3))
        y = (X[:, 1] + 0.3 * rng.normal(size=60) > 0).astype(float)
        ds = make_dataset(X, y=y)
        f_scores = target_scores(ds, Measure.ANOVA_F)
        for i in range(3):
            assert abs(f_scores[i] - anova_f(X[:, i], y)) < 1e-12
        chi_scores = target_scores(ds, Measure.CHI_SQUARED, bins=6)
        for i in range(3):
            want = chi_squared(X[:, i], y, bins=6, x_discrete=False, y_discrete=True)
            assert abs(chi_scores[i] - want) < 1e-12

    def test_anova_needs_continuous_feature(self):
        X = np.column_stack([np.array([0, 1] * 10, dtype=float)])
        ds = make_dataset(X, kinds=(ColumnKind.BINARY,))
        with pytest.raises(MeasureNotApplicableError):
            target_scores(ds, Measure.ANOVA_F)

    def test_anova_needs_classification_target(self):
        rng = np.random.default_rng(18)
        ds = make_dataset(rng.normal(size=(20, 2)), task=REGRESSION, y=rng.normal(size=20))
        with pytest.raises(MeasureNotApplicableError):
            target_scores(ds, Measure.ANOVA_F)
