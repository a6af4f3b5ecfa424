import numpy as np
import pytest

from qubofs.alpha_search import (
    AlphaSearchConfig,
    AlphaSearchResult,
    probe_alpha,
    search_alpha,
)
from qubofs.errors import DegenerateInputError, KTargetOutOfRangeError
from qubofs.qubo import build_qubo
from qubofs.solver import solve_exhaustive
from qubofs.stats import Measure, ScoreSet


def make_scores(importance, red_pairs=()):
    importance = np.asarray(importance, dtype=np.float64)
    n = importance.shape[0]
    red = np.zeros((n, n), dtype=np.float64)
    for i, j, v in red_pairs:
        red[i, j] = red[j, i] = v
    return ScoreSet(importance=importance, redundancy=red, measure=Measure.MUTUAL_INFORMATION, bin_count=10)


def random_scores(rng, n):
    importance = rng.uniform(0.05, 1.0, size=n)
    upper = np.triu(rng.uniform(0.0, 0.4, size=(n, n)), k=1)
    return ScoreSet(importance=importance, redundancy=upper + upper.T, measure=Measure.SPEARMAN_ABS, bin_count=10)


def grid_attainable_ks(scores, points=2001):
    """Oracle: which cardinalities does a fine alpha grid reach?"""
    seen = set()
    for alpha in np.linspace(0.0, 1.0, points):
        result = solve_exhaustive(build_qubo(scores, float(alpha)))
        seen.add(result.k_selected)
    return seen


class TestProbeEndpoints:
    def test_alpha_one_selects_all(self):
        rng = np.random.default_rng(50)
        scores = random_scores(rng, 8)
        result = probe_alpha(scores, 1.0, backend="exhaustive")
        assert result.k_selected == 8

    def test_alpha_zero_selects_none(self):
        rng = np.random.default_rng(51)
        scores = random_scores(rng, 8)
        result = probe_alpha(scores, 0.0, backend="exhaustive")
        assert result.k_selected == 0
        np.testing.assert_array_equal(result.bits, np.zeros(8, dtype=np.uint8))


class TestSearchAlpha:
    def test_no_redundancy_k_equals_n(self):
        scores = make_scores([0.5, 0.3, 0.2, 0.1])
        result = search_alpha(scores, AlphaSearchConfig(k_target=4))
        assert result.exact
        assert result.k_achieved == 4
        np.testing.assert_array_equal(result.selection, np.ones(4, dtype=np.uint8))
        # First probe alpha=0.5 already rewards every feature.
        assert len(result.trace) == 1

    def test_three_feature_fixture_k2(self):
        scores = make_scores([0.5, 0.4, 0.1], [(0, 1, 0.3)])
        result = search_alpha(scores, AlphaSearchConfig(k_target=2))
        assert result.exact
        assert result.k_achieved == 2
        picked = set(result.selected_indices())
        # Oracle: at the found alpha the exhaustive minimizer itself.
        oracle = solve_exhaustive(build_qubo(scores, result.alpha))
        assert picked == set(oracle.selected_indices())
        assert picked in ({0, 1}, {0, 2})

    def test_k_target_out_of_range(self):
        scores = make_scores([0.5, 0.4, 0.1])
        with pytest.raises(KTargetOutOfRangeError):
            search_alpha(scores, AlphaSearchConfig(k_target=4))
        with pytest.raises(KTargetOutOfRangeError):
            search_alpha(scores, AlphaSearchConfig(k_target=0))

    def test_terminates_within_max_iters(self):
        rng = np.random.default_rng(52)
        scores = random_scores(rng, 10)
        for k in range(1, 11):
            result = search_alpha(scores, AlphaSearchConfig(k_target=k, max_iters=32))
            assert len(result.trace) <= 32
            assert result.k_achieved == int(result.selection.sum())

    def test_exact_for_grid_attainable_targets(self):
        rng = np.random.default_rng(53)
        scores = random_scores(rng, 8)
        attainable = grid_attainable_ks(scores, points=401)
        for k in sorted(attainable & set(range(1, 9))):
            result = search_alpha(scores, AlphaSearchConfig(k_target=k))
            assert result.exact, f"missed attainable k={k}: trace={result.trace}"

    def test_determinism_with_sa_backend(self):
        rng = np.random.default_rng(54)
        scores = random_scores(rng, 12)
        cfg = AlphaSearchConfig(
            k_target=5,
            backend="sa",
            params={"seed": 9, "sweeps": 80, "restarts": 2},
        )
        a = search_alpha(scores, cfg)
        b = search_alpha(scores, cfg)
        assert a.trace == b.trace
        assert a.alpha == b.alpha
        np.testing.assert_array_equal(a.selection, b.selection)
        assert a.non_monotone_observed == b.non_monotone_observed

    def test_non_exact_returns_closest(self):
        # Two equal fully-redundant pairs: the marginal gain of a third
        # feature crosses zero at the same alpha as the fourth, so the
        # selected count jumps from 2 to 4 and k=3 is unattainable.
        scores = make_scores(
            [0.5, 0.5, 0.5, 0.5],
            [(0, 1, 10.0), (2, 3, 10.0)],
        )
        result = search_alpha(scores, AlphaSearchConfig(k_target=3, max_iters=16))
        assert not result.exact
        # Ties between k=2 and k=4 resolve toward the smaller count.
        assert result.k_achieved == 2
        assert len(result.trace) == 16

    def test_bad_config(self):
        with pytest.raises(DegenerateInputError):
            AlphaSearchConfig(k_target=1, max_iters=0)
        with pytest.raises(DegenerateInputError):
            AlphaSearchConfig(k_target=1, alpha_lo=0.8, alpha_hi=0.2)

    def test_json_dict_shape(self):
        scores = make_scores([0.5, 0.4, 0.1], [(0, 1, 0.3)])
        result = search_alpha(scores, AlphaSearchConfig(k_target=2))
        d = result.to_json_dict()
        assert d["kind"] == "alpha_search_result"
        assert d["k_achieved"] == 2
        assert d["exact"] is True
        assert all(len(pair) == 2 for pair in d["trace"])

    def test_popcount_certificate_enforced(self):
        with pytest.raises(DegenerateInputError):
            AlphaSearchResult(
                alpha=0.5,
                selection=np.array([1, 0, 1], dtype=np.uint8),
                k_achieved=3,
                exact=False,
                trace=((0.5, 2),),
                non_monotone_observed=False,
            )
