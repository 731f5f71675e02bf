"""Entropy, validity, and monotonicity metrics."""

import math

import numpy as np
import pytest

import helpers
from annealfair.fairness import (
    FairnessRecord,
    entropy,
    monotone_nondecreasing,
    monotonic_increase_rate,
    validity,
)


class TestEntropy:
    def test_uniform_four_is_two_bits(self):
        assert entropy([0.25, 0.25, 0.25, 0.25]) == 2.0

    def test_normalization_built_in(self):
        # common scale drops out: these are the same distribution
        assert entropy([0.1, 0.1, 0.1, 0.1]) == 2.0
        assert entropy([0.4, 0.4, 0.4, 0.4]) == 2.0

    def test_biased_four_state_value(self):
        # two states at 0.4 and two at 0.1, the shape a long anneal converges to
        assert entropy([0.4, 0.4, 0.1, 0.1]) == pytest.approx(1.7219, abs=1e-4)

    def test_hardware_style_values(self):
        p = [0.153, 0.183, 0.182, 0.153]
        assert sum(p) == pytest.approx(0.671)
        assert entropy(p) == pytest.approx(1.994, abs=1e-3)

    def test_all_zero_raises(self):
        with pytest.raises(ValueError):
            entropy([0.0, 0.0])

    def test_subfloor_values_are_zero(self):
        # integrator noise below the floor must not contribute log terms
        assert entropy([0.5, 0.5, 1e-16]) == pytest.approx(1.0)

    def test_zero_entries_contribute_nothing(self):
        assert entropy([1.0, 0.0, 0.0]) == 0.0

    @pytest.mark.parametrize("seed", range(5))
    def test_permutation_invariant(self, seed):
        rng = np.random.default_rng(seed)
        p = rng.random(6)
        shuffled = rng.permutation(p)
        assert entropy(p) == pytest.approx(entropy(shuffled), abs=1e-12)

    @pytest.mark.parametrize("d", [2, 4, 8])
    def test_maximized_by_uniform(self, d):
        rng = np.random.default_rng(d)
        uniform = entropy([1.0 / d] * d)
        assert uniform == pytest.approx(math.log2(d), abs=1e-12)
        for _ in range(20):
            p = rng.random(d)
            assert entropy(p) <= uniform + 1e-12

    def test_matches_textbook_formula(self):
        rng = np.random.default_rng(42)
        for _ in range(20):
            p = rng.random(4) + 1e-3
            assert entropy(p) == pytest.approx(helpers.shannon_bits(p), abs=1e-12)

    def test_continuity_under_small_perturbation(self):
        rng = np.random.default_rng(7)
        p = rng.random(4) + 1e-6
        nudged = [v + 1e-9 for v in p]
        assert abs(entropy(nudged) - entropy(p)) <= 1e-6


class TestValidity:
    def test_exact_one(self):
        assert validity(1.0)

    def test_half_is_invalid(self):
        assert not validity(0.5)

    def test_just_above_default_threshold(self):
        assert validity(0.9995)

    def test_custom_threshold(self):
        assert validity(0.95, threshold=0.9)
        assert not validity(0.95, threshold=0.99)


class TestMonotone:
    def test_constant_series(self):
        assert monotone_nondecreasing([1.5, 1.5, 1.5])

    def test_strictly_rising(self):
        assert monotone_nondecreasing([1.0, 1.5, 2.0])

    def test_mid_series_dip(self):
        assert not monotone_nondecreasing([1.5, 1.4, 1.6])

    def test_slack_absorbs_noise(self):
        assert monotone_nondecreasing([1.0, 1.0 - 1e-7, 1.1])
        assert not monotone_nondecreasing([1.0, 1.0 - 1e-7, 1.1], slack=0.0)

    def test_single_point_is_monotone(self):
        assert monotone_nondecreasing([1.2])

    def test_empty_raises(self):
        with pytest.raises(ValueError):
            monotone_nondecreasing([])


class TestRate:
    def test_all_true(self):
        assert monotonic_increase_rate([True] * 100) == 1.0

    def test_all_false(self):
        assert monotonic_increase_rate([False] * 10) == 0.0

    def test_91_of_100(self):
        assert monotonic_increase_rate([True] * 91 + [False] * 9) == pytest.approx(0.91)

    def test_empty_raises(self):
        with pytest.raises(ValueError):
            monotonic_increase_rate([])


class TestFairnessRecord:
    def test_round_trips(self):
        rec = FairnessRecord.from_probabilities("lambda", 0.5, 1e5, [0.3, 0.3, 0.2, 0.2])
        assert FairnessRecord.from_json(rec.to_json()) == rec

    def test_from_probabilities_fields(self):
        rec = FairnessRecord.from_probabilities("lambda", 0.5, 100.0, [0.25] * 4)
        assert rec.p_gs == pytest.approx(1.0)
        assert rec.valid
        assert rec.entropy == pytest.approx(2.0)

    def test_invalid_below_threshold(self):
        rec = FairnessRecord.from_probabilities("mu_plus", 0.2, 100.0, [0.1] * 4)
        assert not rec.valid
        assert rec.entropy == pytest.approx(2.0)  # entropy is still reported

    def test_csv_row_shape(self):
        rec = FairnessRecord.from_probabilities("lambda", 0.3, 10.0, [0.5, 0.5])
        header = FairnessRecord.csv_header(2)
        assert header == "control_kind,control,T,p_gs,entropy,valid,p_1,p_2"
        assert len(rec.to_csv_row().split(",")) == len(header.split(","))

    def test_failed_record_is_nan_and_invalid(self):
        rec = FairnessRecord.failed("lambda", 0.1, 10.0, 4)
        assert not rec.valid
        assert math.isnan(rec.p_gs) and math.isnan(rec.entropy)

    def test_rejects_bad_kind(self):
        with pytest.raises(ValueError):
            FairnessRecord.from_probabilities("gamma", 0.1, 1.0, [1.0])

    def test_rejects_inconsistent_sum(self):
        with pytest.raises(ValueError):
            FairnessRecord(
                control_kind="lambda",
                control=0.1,
                T=1.0,
                p_gs=0.9,
                p_per_state=(0.1, 0.1),
                entropy=1.0,
                valid=False,
            )
