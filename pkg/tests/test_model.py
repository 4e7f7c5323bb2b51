import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from regcomply.model import (
    DomainError,
    SignedSupport,
    SortedMagnitudeView,
    SparsityModel,
    WeightVector,
    best_support,
    model_descent_set_contains,
    normalize_weights,
    signed_descent_cone_contains,
    weighted_l1,
)

weights_st = st.lists(st.floats(0.05, 1.0), min_size=2, max_size=6).map(normalize_weights)


class TestWeightVector:
    def test_normalize(self):
        np.testing.assert_array_equal(normalize_weights([2, 1, 0.5]).w, [1, 0.5, 0.25])
        np.testing.assert_array_equal(normalize_weights([1, 1, 1]).w, [1, 1, 1])

    def test_rejects_nonpositive(self):
        with pytest.raises(DomainError):
            normalize_weights([0, 1])
        with pytest.raises(DomainError):
            WeightVector(np.array([1.0, -0.2]))

    def test_rejects_unnormalized(self):
        with pytest.raises(DomainError):
            WeightVector(np.array([0.5, 0.5]))

    def test_immutable(self):
        w = WeightVector.ones(3)
        with pytest.raises(ValueError):
            w.w[0] = 2.0

    def test_equality_and_hash(self):
        a, b = normalize_weights([2, 1]), WeightVector(np.array([1.0, 0.5]))
        assert a == b and hash(a) == hash(b)
        assert a.is_ones() is False and WeightVector.ones(2).is_ones()


class TestSparsityModel:
    def test_undersized_warns(self):
        with pytest.warns(UserWarning):
            m = SparsityModel(3, 2)
        assert m.undersized

    def test_invalid(self):
        with pytest.raises(DomainError):
            SparsityModel(3, 0)


class TestSignedSupport:
    def test_validation(self):
        with pytest.raises(DomainError):
            SignedSupport((0, 0), (1, 1))
        with pytest.raises(DomainError):
            SignedSupport((0,), (2,))
        with pytest.raises(DomainError):
            SignedSupport.positive((0, 3)).check(3)
        with pytest.raises(DomainError):
            SignedSupport.positive((0, 1)).check(3, k=1)


class TestWeightedL1:
    def test_examples(self):
        assert weighted_l1(np.array([1, -2, 3]), WeightVector.ones(3)) == 6
        assert weighted_l1(np.array([1, -2, 3]), normalize_weights([1, 0.5, 0.5])) == 3.5
        assert weighted_l1(np.zeros(3), WeightVector.ones(3)) == 0


class TestSignedCone:
    w = WeightVector.ones(3)
    s = SignedSupport.positive((0,))

    def test_examples(self):
        assert signed_descent_cone_contains(self.w, self.s, np.array([-1, 0.5, 0.4]))
        assert not signed_descent_cone_contains(self.w, self.s, np.array([-1, 0.6, 0.5]))
        # boundary generator e_2 - e_1
        assert signed_descent_cone_contains(self.w, self.s, np.array([-1, 1, 0]))

    def test_batch_matches_rows(self):
        z = np.random.default_rng(0).normal(size=(200, 3))
        batch = signed_descent_cone_contains(self.w, self.s, z)
        assert list(batch) == [signed_descent_cone_contains(self.w, self.s, row) for row in z]

    @settings(max_examples=100, deadline=None)
    @given(weights_st, st.integers(0, 10**6), st.floats(1e-3, 1e3))
    def test_scale_invariance(self, w, seed, t):
        z = np.random.default_rng(seed).normal(size=w.n)
        s = SignedSupport((0,), (1,))
        assert signed_descent_cone_contains(w, s, z) == signed_descent_cone_contains(w, s, t * z)


class TestModelDescentSet:
    def test_examples(self):
        m = SparsityModel(3, 1)
        assert model_descent_set_contains(WeightVector.ones(3), m, np.array([1, 0.5, 0.4]))
        assert not model_descent_set_contains(WeightVector.ones(3), m, np.array([1, 1, 1]))

    def test_best_support_by_weighted_magnitude(self):
        # weighted magnitudes (0, 0.5, 0.4): the best support is the middle index, and 0.5 >= 0.4
        w = normalize_weights([1, 1, 0.1])
        z = np.array([0, 0.5, 4])
        np.testing.assert_array_equal(best_support(z, w, 1), [1])
        assert model_descent_set_contains(w, SparsityModel(3, 1), z)

    @settings(max_examples=60, deadline=None)
    @given(weights_st, st.integers(0, 10**6))
    def test_matches_enumeration_over_supports(self, w, seed):
        import itertools

        z = np.random.default_rng(seed).normal(size=w.n)
        k = 1 + seed % max(1, w.n // 2)
        a = w.w * np.abs(z)
        exists = any(a[list(h)].sum() >= a.sum() - a[list(h)].sum() for h in itertools.combinations(range(w.n), k))
        assert model_descent_set_contains(w, SparsityModel(w.n, k), z) == exists

    @settings(max_examples=60, deadline=None)
    @given(weights_st, st.integers(0, 10**6), st.floats(1e-3, 1e3))
    def test_scale_invariance(self, w, seed, t):
        z = np.random.default_rng(seed).normal(size=w.n)
        m = SparsityModel(w.n, 1)
        assert model_descent_set_contains(w, m, z) == model_descent_set_contains(w, m, t * z)

    def test_dimension_mismatch(self):
        with pytest.raises(DomainError):
            model_descent_set_contains(WeightVector.ones(3), SparsityModel(3, 1), np.ones(4))


class TestSortedView:
    def test_ties_to_lowest_index(self):
        v = SortedMagnitudeView(np.array([1.0, -3.0, 3.0, 0.5]), 1)
        np.testing.assert_array_equal(v.top, [1])
        np.testing.assert_array_equal(v.top2, [1, 2])
        np.testing.assert_array_equal(v.sorted_magnitudes, [3, 3, 1, 0.5])
