import numpy as np
import pytest

from diffad.combine import CombinationMode, PairCombiner, combine, combine_matrix


class TestCombine:
    def test_equal_inputs_give_zero_vector(self, rng):
        a = rng.normal(size=16)
        for mode in CombinationMode:
            assert np.array_equal(combine(a, a, mode).values, np.zeros(16))

    def test_worked_fixture(self):
        a, b = np.array([1.0, 2.0]), np.array([0.0, 4.0])
        assert np.array_equal(combine(a, b, CombinationMode.ABS).values, [1.0, 2.0])
        assert np.array_equal(combine(a, b, CombinationMode.SUB).values, [1.0, -2.0])
        assert np.array_equal(combine(a, b, CombinationMode.SUB2).values, [1.0, 4.0])
        assert np.array_equal(combine(a, b, CombinationMode.SUB3).values, [1.0, -8.0])

    def test_symmetry_properties(self, rng):
        for _ in range(20):
            a = rng.normal(size=12)
            b = rng.normal(size=12)
            sub_ab = combine(a, b, CombinationMode.SUB).values
            sub_ba = combine(b, a, CombinationMode.SUB).values
            assert np.array_equal(sub_ab, -sub_ba)
            assert np.array_equal(
                combine(a, b, CombinationMode.ABS).values,
                combine(b, a, CombinationMode.ABS).values,
            )
            assert np.array_equal(
                combine(a, b, CombinationMode.SUB2).values,
                combine(b, a, CombinationMode.SUB2).values,
            )
            assert np.array_equal(
                combine(a, b, CombinationMode.SUB3).values,
                -combine(b, a, CombinationMode.SUB3).values,
            )

    def test_compositional_consistency(self, rng):
        a = rng.normal(size=10)
        b = rng.normal(size=10)
        sub = combine(a, b, CombinationMode.SUB).values
        sub2 = combine(a, b, CombinationMode.SUB2).values
        sub3 = combine(a, b, CombinationMode.SUB3).values
        assert np.array_equal(sub2, sub * sub)
        assert np.array_equal(sub3, sub2 * sub)

    def test_abs_nonnegative(self, rng):
        a, b = rng.normal(size=30), rng.normal(size=30)
        assert np.all(combine(a, b, CombinationMode.ABS).values >= 0)

    def test_length_mismatch_rejected(self):
        with pytest.raises(ValueError, match="length"):
            combine(np.zeros(3), np.zeros(4), CombinationMode.SUB)

    def test_provenance_carried(self):
        feat = combine(np.zeros(2), np.ones(2), CombinationMode.SUB2, pair=("v0", 1, 8))
        assert feat.pair == ("v0", 1, 8)
        assert feat.mode is CombinationMode.SUB2


class TestBatch:
    def test_matrix_matches_per_row_combine(self, rng):
        A = rng.normal(size=(6, 5))
        B = rng.normal(size=(6, 5))
        M = combine_matrix(A, B, CombinationMode.SUB3)
        for i in range(6):
            assert np.array_equal(M[i], combine(A[i], B[i], CombinationMode.SUB3).values)

    def test_pair_combiner_transformer(self, rng):
        A = rng.normal(size=(4, 7))
        B = rng.normal(size=(4, 7))
        X = np.stack([A, B], axis=1)
        out = PairCombiner(CombinationMode.SUB2).fit_transform(X)
        assert np.array_equal(out, combine_matrix(A, B, CombinationMode.SUB2))

    def test_pair_combiner_rejects_bad_shape(self, rng):
        with pytest.raises(ValueError, match="stacked pairs"):
            PairCombiner().transform(rng.normal(size=(4, 3, 7)))

    def test_get_params_round_trip(self):
        combiner = PairCombiner(CombinationMode.SUB3)
        assert combiner.get_params()["mode"] is CombinationMode.SUB3
