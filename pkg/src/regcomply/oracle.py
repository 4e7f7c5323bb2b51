"""Brute-force evaluators used to arbitrate closed forms and suprema on small instances.

Nothing here reuses the reductions behind the fast evaluators in ``rip``: the
grid search enumerates every support, and conditioning is computed from an
explicit projector matrix.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from ._workers import ordered_map
from .geometry import SPHERE_AREA_3D
from .model import (
    DomainError,
    SignedSupport,
    SparsityModel,
    WeightVector,
    model_descent_set_contains,
    signed_descent_cone_contains,
)
from .rip import B_value_rows, D_value_rows
from .sampling import DEFAULT_SAMPLES, EstimateWithError, estimate_cone_fraction
from .search import best_of

MAX_GRID_POINTS = 10**8
DEFAULT_GRID_BUDGET = 3 * 10**6


class BudgetError(RuntimeError):
    """Raised when a brute-force enumeration would exceed its point budget."""


@dataclass(frozen=True)
class AreaEstimate:
    area: float
    std_error: float
    fraction: EstimateWithError

    def within(self, value: float, sigmas: float = 3.0) -> bool:
        return abs(self.area - value) <= sigmas * self.std_error


def brute_cone_area_3d(
    w: WeightVector, axis: int, sign: int = 1, samples: int = DEFAULT_SAMPLES, seed: int = 0, workers=None
) -> AreaEstimate:
    """Monte Carlo area of the signed descent cone at ``sign * e_axis`` in R^3."""
    if w.n != 3:
        raise DomainError("brute_cone_area_3d needs n = 3")
    s = SignedSupport((axis,), (sign,))
    est = estimate_cone_fraction(lambda x: signed_descent_cone_contains(w, s, x), 3, samples, seed, workers)
    return AreaEstimate(est.estimate * SPHERE_AREA_3D, est.std_error * SPHERE_AREA_3D, est)


# --- grid suprema ------------------------------------------------------------


@dataclass(frozen=True)
class GridSpec:
    """Magnitude grid ``{0} u {rho_min^(j/levels) : j = 0..levels}``.

    Doubling ``levels`` gives a superset of the previous grid.
    """

    levels: int = 16
    rho_min: float = 1e-2

    def __post_init__(self):
        if self.levels < 1:
            raise DomainError("GridSpec.levels must be >= 1")
        if not 0 < self.rho_min < 1:
            raise DomainError("GridSpec.rho_min must lie in (0, 1)")

    def values(self) -> np.ndarray:
        """Grid values in descending order, ending with 0."""
        j = np.arange(self.levels + 1)
        pos = self.rho_min ** (j / self.levels)
        pos[0] = 1.0
        return np.append(pos, 0.0)

    def refined(self) -> GridSpec:
        return GridSpec(2 * self.levels, self.rho_min)

    def point_count(self, model: SparsityModel) -> int:
        g = self.levels + 2
        per_support = math.comb(g + model.k - 1, model.k) * math.comb(g + model.n - model.k - 1, model.n - model.k)
        # raw point, block rescaling, and one single-coordinate completion per index
        return (model.n + 2) * math.comb(model.n, model.k) * per_support

    @classmethod
    def default_for(cls, model: SparsityModel, budget: int = DEFAULT_GRID_BUDGET) -> GridSpec:
        """Finest power-of-two refinement of 2 levels that fits the budget."""
        spec = cls(2)
        while spec.refined().point_count(model) <= budget and spec.levels < 64:
            spec = spec.refined()
        return spec


def oracle_supported(model: SparsityModel) -> bool:
    return model.n <= 6 and model.k <= 2


def _sorted_tuples(values: np.ndarray, size: int) -> np.ndarray:
    """All non-increasing ``size``-tuples drawn from descending ``values``."""
    idx = list(itertools.combinations_with_replacement(range(values.size), size))
    return values[np.array(idx, dtype=int)] if size else np.zeros((1, 0))


def _grid_sup(w: WeightVector, model: SparsityModel, grid: GridSpec, rows_fn, workers=None):
    if model.n != w.n:
        raise DomainError(f"model dimension {model.n} does not match weights dimension {w.n}")
    if not oracle_supported(model):
        raise DomainError("brute-force suprema need n <= 6 and k <= 2")
    if grid.point_count(model) > MAX_GRID_POINTS:
        raise BudgetError(f"grid of {grid.point_count(model)} points exceeds {MAX_GRID_POINTS}")
    n, k = model.n, model.k
    values = grid.values()
    u_all = _sorted_tuples(values, k)
    v_all = _sorted_tuples(values, n - k)

    def for_support(h):
        h = np.array(h)
        hc = np.setdiff1d(np.arange(n), h)
        # largest magnitudes on the largest weights inside H, on the smallest
        # weights outside H: any other arrangement of the same magnitudes has a
        # smaller ||z_H||_w or a larger ||z_{H^c}||_w
        h = h[np.argsort(-w.w[h], kind="stable")]
        hc = hc[np.argsort(w.w[hc], kind="stable")]
        wv = v_all @ w.w[hc]
        best = None
        for u in u_all:
            a = float(u @ w.w[h])
            raw = np.zeros((len(v_all), n))
            raw[:, h] = u
            raw[:, hc] = v_all
            variants = [raw]
            if a > 0.0:
                scale = np.divide(a, wv, out=np.ones_like(wv), where=wv > 0)
                edge = raw.copy()
                edge[:, hc] *= scale[:, None]
                variants.append(edge)
            # close the gap ||z_H||_w - ||z_{H^c}||_w with a single coordinate
            gap = a - wv
            for j in range(n):
                col = raw[:, j] + (gap if j in hc else -gap) / w.w[j]
                ok = col >= 0.0
                if not np.any(ok):
                    continue
                fix = raw[ok].copy()
                fix[:, j] = col[ok]
                variants.append(fix)
            z = np.concatenate(variants)
            z = z[np.any(z > 0, axis=1)]
            z = z[model_descent_set_contains(w, model, z)]
            if len(z) == 0:
                continue
            vals = rows_fn(z, k)
            i = int(np.nanargmax(vals))
            best = best_of([c for c in (best, (float(vals[i]), z[i] / z[i].max())) if c is not None])
        return best

    results = ordered_map(for_support, list(itertools.combinations(range(n), k)), workers)
    best = best_of([r for r in results if r is not None])
    if best is None:
        return 0.0, None
    return best


def brute_B_sigma(w: WeightVector, model: SparsityModel, grid: GridSpec | None = None, workers=None):
    """Grid lower bound of ``B_Sigma`` and its witness (``(0.0, None)`` when ``n <= 2k``)."""
    if model.n <= 2 * model.k:
        return 0.0, None
    return _grid_sup(w, model, grid or GridSpec.default_for(model), B_value_rows, workers)


def brute_D_sigma(w: WeightVector, model: SparsityModel, grid: GridSpec | None = None, workers=None):
    """Grid lower bound of ``D_Sigma`` and its witness (``(0.0, None)`` when ``n <= k``)."""
    if model.n <= model.k:
        return 0.0, None
    return _grid_sup(w, model, grid or GridSpec.default_for(model), D_value_rows, workers)


# --- explicit conditioning ---------------------------------------------------


def brute_gamma_projector(z, model: SparsityModel, eig_tol: float = 1e-10) -> float:
    """Restricted conditioning of ``I - z z^T / ||z||^2`` by eigen-analysis on every ``2k``-support."""
    z = np.asarray(z, dtype=float).reshape(-1)
    n = z.size
    if n > 10:
        raise DomainError("brute_gamma_projector is limited to n <= 10")
    if not np.any(z):
        raise DomainError("z must be nonzero")
    if n != model.n:
        raise DomainError(f"dimension mismatch: {n} vs model n={model.n}")
    proj = np.eye(n) - np.outer(z, z) / (z @ z)
    size = min(2 * model.k, n)
    hi, lo = -np.inf, np.inf
    for s in itertools.combinations(range(n), size):
        s = list(s)
        eig = np.linalg.eigvalsh(proj[np.ix_(s, s)])
        hi = max(hi, eig[-1])
        lo = min(lo, eig[0])
    if lo <= eig_tol:
        return math.inf
    return float(hi / lo)


# --- battery -----------------------------------------------------------------


def standard_battery() -> list[tuple[WeightVector, SparsityModel]]:
    """Twelve weight vectors over small instances with ``n <= 6`` and ``k <= 2``."""
    from .model import normalize_weights

    raw = [
        ((1, 1, 1), 1),
        ((1, 1, 0.5), 1),
        ((1, 0.6, 0.3), 1),
        ((1, 1, 1, 1), 1),
        ((1, 0.8, 0.5, 0.3), 1),
        ((1, 0.9, 0.9, 0.9), 1),
        ((1, 1, 1, 1, 1), 2),
        ((1, 0.7, 0.7, 0.4, 0.2), 2),
        ((1, 0.5, 0.5, 0.5, 0.5, 0.5), 1),
        ((0.3, 1, 0.6, 0.9, 0.2, 0.75), 1),
        ((1, 1, 1, 1, 1, 1), 2),
        ((1, 0.9, 0.8, 0.7, 0.6, 0.5), 2),
    ]
    return [(normalize_weights(w), SparsityModel(len(w), k)) for w, k in raw]
