import math

import numpy as np
import pytest

from regcomply.geometry import descent_cone_area_3d
from regcomply.model import DomainError, SparsityModel, WeightVector, normalize_weights
from regcomply.oracle import (
    MAX_GRID_POINTS,
    BudgetError,
    GridSpec,
    brute_B_sigma,
    brute_cone_area_3d,
    brute_D_sigma,
    brute_gamma_projector,
    standard_battery,
)
from regcomply.rip import gamma_projector


class TestConeArea:
    def test_ones(self):
        e = brute_cone_area_3d(WeightVector.ones(3), 0, 1, 10**6, seed=1)
        assert e.within(1.3593, 3)

    def test_sign_flip(self):
        w = normalize_weights([1, 0.6, 0.4])
        a = brute_cone_area_3d(w, 1, 1, 10**6, seed=2)
        b = brute_cone_area_3d(w, 1, -1, 10**6, seed=3)
        assert abs(a.area - b.area) <= 3 * math.hypot(a.std_error, b.std_error)

    def test_weighted_axes(self):
        w = normalize_weights([1, 0.5, 0.5])
        for axis in range(3):
            e = brute_cone_area_3d(w, axis, 1, 10**6, seed=axis)
            assert e.within(descent_cone_area_3d(w, axis).value, 3)

    def test_requires_n3(self):
        with pytest.raises(DomainError):
            brute_cone_area_3d(WeightVector.ones(4), 0)


class TestGrid:
    def test_values(self):
        v = GridSpec(4, 0.01).values()
        assert v[0] == 1.0 and v[-1] == 0.0 and np.all(np.diff(v) < 0)
        assert set(v).issubset(set(GridSpec(8, 0.01).values()))

    def test_budget(self):
        m = SparsityModel(6, 2)
        assert GridSpec.default_for(m).point_count(m) <= 3 * 10**6
        with pytest.raises(BudgetError):
            brute_B_sigma(WeightVector.ones(6), m, GridSpec(4096))
        assert GridSpec(4096).point_count(m) > MAX_GRID_POINTS

    def test_size_guard(self):
        with pytest.raises(DomainError):
            brute_B_sigma(WeightVector.ones(7), SparsityModel(7, 1))


class TestBruteSuprema:
    def test_B_ones(self):
        for n in (3, 4):
            v, z = brute_B_sigma(WeightVector.ones(n), SparsityModel(n, 1))
            np.testing.assert_allclose(v, 0.2, rtol=0.02)
        v, _ = brute_B_sigma(WeightVector.ones(3), SparsityModel(3, 1), GridSpec(48))
        np.testing.assert_allclose(v, 0.2, rtol=0.02)

    def test_B_weighted_above_l1(self):
        v, _ = brute_B_sigma(normalize_weights([1, 1, 0.6]), SparsityModel(3, 1))
        assert v > 0.2

    def test_D_ones(self):
        v, _ = brute_D_sigma(WeightVector.ones(2), SparsityModel(2, 1))
        np.testing.assert_allclose(v, 1.0, rtol=0.02)
        v, _ = brute_D_sigma(WeightVector.ones(4), SparsityModel(4, 2))
        np.testing.assert_allclose(v, 1.0, rtol=0.02)

    def test_D_two_dims_weighted(self):
        # with n = 2 and k = 1 the off-support part is a single entry bounded by the
        # on-support entry, so D equals 1 for every weight vector
        v, z = brute_D_sigma(normalize_weights([1, 0.5]), SparsityModel(2, 1))
        np.testing.assert_allclose(v, 1.0, rtol=1e-12)

    def test_refinement_monotone(self):
        w = normalize_weights([1, 0.7, 0.4, 0.2])
        m = SparsityModel(4, 1)
        for fn in (brute_B_sigma, brute_D_sigma):
            coarse = fn(w, m, GridSpec(4))[0]
            fine = fn(w, m, GridSpec(8))[0]
            assert fine >= coarse

    def test_degenerate(self):
        assert brute_B_sigma(WeightVector.ones(4), SparsityModel(4, 2)) == (0.0, None)


class TestGammaProjector:
    def test_matches_closed_form(self):
        np.testing.assert_allclose(brute_gamma_projector([1, 1, 1], SparsityModel(3, 1)), 3.0, rtol=1e-9)
        assert brute_gamma_projector([1, 1, 0, 0], SparsityModel(4, 1)) == math.inf
        rng = np.random.default_rng(4)
        for _ in range(50):
            z = rng.normal(size=6)
            m = SparsityModel(6, 1)
            np.testing.assert_allclose(brute_gamma_projector(z, m), gamma_projector(z, m), rtol=1e-9)

    def test_limit(self):
        with pytest.raises(DomainError):
            brute_gamma_projector(np.ones(11), SparsityModel(11, 1))


def test_battery_shape():
    battery = standard_battery()
    assert len(battery) == 12
    assert all(m.n <= 6 and m.k <= 2 and w.n == m.n for w, m in battery)
