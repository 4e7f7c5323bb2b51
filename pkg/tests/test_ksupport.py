import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from regcomply.ksupport import KSupportNorm, ksupport_norm, ksupport_norm_oracle, ksupport_norm_rows, ksupport_norm_sq
from regcomply.model import DomainError

vec_st = st.lists(st.floats(-10, 10, allow_subnormal=False), min_size=1, max_size=8).map(np.array)


class TestClosedForm:
    def test_examples(self):
        np.testing.assert_allclose(ksupport_norm([1, 1, 1, 0], 2), math.sqrt(4.5), rtol=1e-14)
        np.testing.assert_allclose(ksupport_norm([1, 0.5, 0, 0], 2), math.sqrt(1.25), rtol=1e-14)
        np.testing.assert_allclose(ksupport_norm([1, -2, 3], 1), 6.0, rtol=1e-14)
        assert ksupport_norm(np.zeros(4), 2) == 0.0

    def test_flat_law(self):
        for k in range(1, 5):
            for L in range(k, 9):
                z = np.zeros(9)
                z[:L] = 1.0
                assert ksupport_norm_sq(z, k) == L * L / k

    def test_limits(self):
        z = np.random.default_rng(0).normal(size=6)
        np.testing.assert_allclose(ksupport_norm(z, 6), np.linalg.norm(z), rtol=1e-13)
        np.testing.assert_allclose(ksupport_norm(z, 9), np.linalg.norm(z), rtol=1e-13)
        np.testing.assert_allclose(ksupport_norm(z, 1), np.abs(z).sum(), rtol=1e-13)

    def test_rows_match_scalar(self):
        z = np.random.default_rng(1).normal(size=(50, 7))
        np.testing.assert_allclose(ksupport_norm_rows(z, 3), [ksupport_norm(r, 3) for r in z], rtol=1e-14)

    def test_callable(self):
        np.testing.assert_allclose(KSupportNorm(2)([1, 1, 1, 0]), math.sqrt(4.5), rtol=1e-14)

    def test_invalid_k(self):
        with pytest.raises(DomainError):
            ksupport_norm([1, 2], 0)

    @settings(max_examples=200, deadline=None)
    @given(vec_st, st.integers(1, 8))
    def test_between_l2_and_l1(self, z, k):
        v = ksupport_norm(z, k)
        assert np.linalg.norm(z) * (1 - 1e-12) <= v <= np.abs(z).sum() * (1 + 1e-12) + 1e-300

    @settings(max_examples=200, deadline=None)
    @given(vec_st, st.integers(1, 8))
    def test_matches_oracle(self, z, k):
        np.testing.assert_allclose(ksupport_norm(z, k), ksupport_norm_oracle(z, k), rtol=1e-8, atol=1e-12)


class TestOracle:
    def test_examples(self):
        assert ksupport_norm_oracle([1, 0, 0], 2) == 1.0
        np.testing.assert_allclose(ksupport_norm_oracle([1, 1, 1, 0], 2), math.sqrt(4.5), rtol=1e-10)
        assert ksupport_norm_oracle(np.zeros(3), 1) == 0.0

    def test_bad_tolerance(self):
        with pytest.raises(DomainError):
            ksupport_norm_oracle([1, 2], 1, tolerance=0.0)


class TestNormAxioms:
    rng = np.random.default_rng(7)

    def test_homogeneity_and_triangle(self):
        for _ in range(300):
            n = int(self.rng.integers(2, 9))
            k = int(self.rng.integers(1, n + 1))
            x, y = self.rng.normal(size=(2, n))
            t = self.rng.normal()
            np.testing.assert_allclose(ksupport_norm(t * x, k), abs(t) * ksupport_norm(x, k), rtol=1e-10)
            assert ksupport_norm(x + y, k) <= ksupport_norm(x, k) + ksupport_norm(y, k) + 1e-10

    def test_monotone_in_magnitudes(self):
        for _ in range(300):
            n = int(self.rng.integers(2, 9))
            k = int(self.rng.integers(1, n + 1))
            big = self.rng.normal(size=n)
            small = big * self.rng.uniform(0, 1, n) * self.rng.choice([-1, 1], n)
            assert ksupport_norm(small, k) <= ksupport_norm(big, k) + 1e-12
