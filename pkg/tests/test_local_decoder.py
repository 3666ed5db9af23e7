"""
Tests for line ensembles and the agreement decoder.
"""

import numpy as np
import pytest

from hdxcodes.services.algebra import ShapeError, counter_rng
from hdxcodes.services.local_decoder import (
    DecodeStatus,
    DecoderError,
    LineEnsemble,
    agreement_decode,
    brute_nearest,
    cached_local_code,
    corrupt_rows,
    decoder_trial,
    disagreement_set,
    fit_error_locator,
    fit_quotient,
    hypothesis_holds,
    locator_schedule,
    merge_views,
    restrict,
)


def random_member(p, d_x, d_y, seed):
    spec = cached_local_code(p, d_x, d_y)
    return spec.encode(counter_rng(seed, 0).integers(0, p, size=spec.dim))


class TestEnsembles:
    """Tests for restriction to row and skew lines."""

    def test_restriction_reproduces_word(self):
        word = random_member(7, 1, 2, seed=1)
        x, y = restrict(word, 1, 2, 7)
        assert np.array_equal(x.values(), word)
        assert np.array_equal(y.values(), word)
        s, fraction = disagreement_set(x, y)
        assert s.size == 0 and fraction == 0.0

    def test_restriction_rejects_non_member(self):
        word = random_member(7, 1, 1, seed=2)
        word[3] = (word[3] + 1) % 7
        with pytest.raises(DecoderError):
            restrict(word, 1, 1, 7)

    def test_shape_validation(self):
        with pytest.raises(ShapeError):
            LineEnsemble(5, 1, np.zeros((24, 2), dtype=np.int64))

    def test_corrupt_rows_changes_only_listed_rows(self):
        word = random_member(7, 1, 1, seed=3)
        x, _ = restrict(word, 1, 1, 7)
        bad = corrupt_rows(x, [5], counter_rng(3, 1))
        changed = np.flatnonzero(np.any(bad.polys != x.polys, axis=1))
        assert changed.tolist() == [5]

    def test_merged_word_takes_rows_on_disagreement_set(self):
        word = random_member(7, 1, 1, seed=14)
        x, y = restrict(word, 1, 1, 7)
        bad = corrupt_rows(x, [3, 20], counter_rng(14, 0))
        s, _ = disagreement_set(bad, y)
        merged = merge_views(bad, y)
        on_s = np.zeros(343, dtype=bool)
        on_s[s] = True
        assert np.array_equal(merged[on_s], bad.values()[on_s])
        assert np.array_equal(merged[~on_s], y.values()[~on_s])
        assert s.size > 0 and not np.array_equal(merged, word)


class TestSchedule:
    """Tests for the decoder's hypothesis and locator-degree schedule."""

    def test_hypothesis_boundary(self):
        # 13^3 = 2197 >= 125 * 17, < 125 * 18
        assert hypothesis_holds(17, 1, 1, 17)
        assert not hypothesis_holds(17, 1, 1, 18)
        assert not hypothesis_holds(5, 2, 1, 0)

    def test_schedule_without_disagreement(self):
        assert locator_schedule(17, 1, 1, 0) == [0, 1, 2]

    def test_schedule_walks_down_after_cap(self):
        assert locator_schedule(17, 1, 1, 17) == [3, 2, 1, 0]


class TestAgreementDecode:
    """Tests for agreement decoding."""

    def test_clean_ensembles_decode_exactly(self):
        word = random_member(11, 1, 1, seed=4)
        x, y = restrict(word, 1, 1, 11)
        result = agreement_decode(x, y)
        assert result.status == DecodeStatus.EXACT
        assert result.delta_cubed == 0.0
        assert result.hypothesis_ok
        assert np.array_equal(result.values, word)
        assert result.line_disagreement == 0.0

    def test_tensor_matches_basis(self):
        word = random_member(7, 1, 1, seed=5)
        x, y = restrict(word, 1, 1, 7)
        result = agreement_decode(x, y)
        spec = cached_local_code(7, 1, 1)
        assert result.tensor(spec).shape == (2, 7, 7)

    def test_single_row_recovery(self):
        for seed in range(5):
            row = decoder_trial(17, 1, 1, seed, rows=1)
            assert row["hypothesisHolds"]
            assert row["recovered"]
            assert row["status"] in ("exact", "within-bound")
            assert row["lineDisagreement"] <= 4 * row["deltaCubed"] ** (1 / 3) + 1e-12

    def test_trial_row_keys(self):
        row = decoder_trial(7, 1, 1, 0, rows=1)
        assert set(row) == {
            "p", "dx", "dy", "seed", "corruption", "deltaCubed", "e", "status",
            "lineDisagreement", "hypothesisHolds", "recovered",
        }
        assert row["corruption"] == {"rows": 1, "lines": 0}

    def test_trial_is_seeded(self):
        assert decoder_trial(7, 1, 1, 42) == decoder_trial(7, 1, 1, 42)


class TestLocatorAndQuotient:
    """Tests for the two linear-algebra steps of agreement decoding."""

    def test_clean_locator_is_constant(self):
        word = random_member(7, 1, 1, seed=8)
        x, y = restrict(word, 1, 1, 7)
        locator = fit_error_locator(x, y, 0)
        assert locator is not None
        assert np.all(locator.values == 1)

    def test_locator_degree_range(self):
        x, y = restrict(random_member(7, 1, 1, seed=9), 1, 1, 7)
        with pytest.raises(DecoderError):
            fit_error_locator(x, y, 7)

    def test_locator_and_quotient_undo_one_row(self):
        word = random_member(17, 1, 1, seed=10)
        x, y = restrict(word, 1, 1, 17)
        bad = corrupt_rows(x, [40], counter_rng(10, 1))
        s, _ = disagreement_set(bad, y)
        assert s.size > 0

        locator = fit_error_locator(bad, y, 2, s)
        assert locator is not None
        assert not np.any(locator.values[s])
        quotient = fit_quotient(bad, locator.values, 1, 1)
        assert quotient is not None
        assert np.array_equal(quotient.values, word)

    def test_zero_locator_gives_no_quotient(self):
        x, _ = restrict(random_member(5, 1, 1, seed=11), 1, 1, 5)
        assert fit_quotient(x, np.zeros(125, dtype=np.int64), 1, 1) is None

    def test_underdetermined_quotient_is_canonical(self):
        x, _ = restrict(random_member(5, 1, 1, seed=12), 1, 1, 5)
        locator = np.zeros(125, dtype=np.int64)
        locator[0] = 1
        quotient = fit_quotient(x, locator, 1, 1)
        assert quotient is not None
        assert not quotient.unique
        assert quotient.values[0] == x.values()[0]
        again = fit_quotient(x, locator, 1, 1)
        assert np.array_equal(again.coeffs, quotient.coeffs)

    def test_full_locator_gives_unique_quotient(self):
        word = random_member(7, 1, 1, seed=13)
        x, _ = restrict(word, 1, 1, 7)
        quotient = fit_quotient(x, np.ones(343, dtype=np.int64), 1, 1)
        assert quotient is not None and quotient.unique
        assert np.array_equal(quotient.values, word)


class TestBruteNearest:
    """Tests for the exhaustive oracle."""

    def test_single_error(self):
        spec = cached_local_code(5, 0, 1)
        word = random_member(5, 0, 1, seed=6)
        noisy = word.copy()
        noisy[10] = (noisy[10] + 2) % 5
        nearest = brute_nearest(noisy, spec)
        assert nearest.distance == 1
        assert np.array_equal(nearest.codeword, word)

    def test_shape_checked(self):
        with pytest.raises(ShapeError):
            brute_nearest(np.zeros(7, dtype=np.int64), cached_local_code(5, 0, 1))


@pytest.mark.slow
def test_single_row_recovery_hundred_trials():
    rows = [decoder_trial(17, 1, 1, seed, rows=1) for seed in range(100)]
    assert all(r["hypothesisHolds"] for r in rows)
    assert sum(r["recovered"] for r in rows) == 100


@pytest.mark.slow
def test_agreement_matches_exhaustive_oracle():
    spec = cached_local_code(5, 1, 1)
    for seed in range(20):
        word = random_member(5, 1, 1, seed=100 + seed)
        x, y = restrict(word, 1, 1, 5)
        result = agreement_decode(x, y)
        assert np.array_equal(result.values, brute_nearest(merge_views(x, y), spec).codeword)
