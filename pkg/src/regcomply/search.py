"""Search settings and the multistart Nelder-Mead driver shared by the suprema and weight searches."""

from __future__ import annotations

from dataclasses import asdict, dataclass, replace

import numpy as np
from scipy.optimize import minimize

from ._workers import ordered_map
from .model import DomainError


@dataclass(frozen=True)
class SearchConfig:
    """Budget for derivative-free searches.

    ``restarts`` random starts are run in addition to any structured starts;
    ``grid_steps`` is the per-coordinate resolution of coarse weight grids.
    """

    restarts: int = 32
    grid_steps: int = 9
    tolerance: float = 1e-10
    max_iters: int = 2000
    seed: int = 0

    def __post_init__(self):
        for name in ("restarts", "grid_steps", "max_iters"):
            if getattr(self, name) < 1:
                raise DomainError(f"SearchConfig.{name} must be positive")
        if not 0 < self.tolerance < 1e-2:
            raise DomainError("SearchConfig.tolerance must lie in (0, 1e-2)")
        if self.seed < 0:
            raise DomainError("SearchConfig.seed must be nonnegative")

    def with_(self, **changes) -> SearchConfig:
        return replace(self, **changes)

    def to_dict(self) -> dict:
        return asdict(self)


# Cheap budget used when a supremum is evaluated many times, e.g. inside
# certificate sweeps or weight optimization.
LIGHT_SEARCH = SearchConfig(restarts=2, max_iters=300)
CERTIFICATE_SEARCH = SearchConfig(restarts=1, max_iters=100)


def restart_rng(seed: int, index: int, stream: int = 0) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(stream, index)))


def nelder_mead_max(objective, x0, max_iters: int, tolerance: float, bounds=None):
    """Maximize ``objective`` from ``x0``; returns ``(value, x, n_evaluations)``."""
    res = minimize(
        lambda x: -objective(x),
        np.asarray(x0, dtype=float),
        method="Nelder-Mead",
        bounds=bounds,
        options={"maxiter": max_iters, "maxfev": 2 * max_iters, "xatol": 1e-10, "fatol": tolerance},
    )
    return -float(res.fun), np.asarray(res.x), int(res.nfev)


def best_of(results):
    """Deterministic max: highest value, ties broken by the lexicographically smallest point."""
    best = None
    for value, x in results:
        if not np.isfinite(value):
            continue
        if best is None or value > best[0] or (value == best[0] and tuple(x) < tuple(best[1])):
            best = (value, x)
    return best


def multistart_max(objective, starts, config: SearchConfig, bounds=None, workers: int | None = None):
    """Run Nelder-Mead from every start and return the best ``(value, x)``."""

    def run(x0):
        value, x, _ = nelder_mead_max(objective, x0, config.max_iters, config.tolerance, bounds)
        return value, x

    return best_of(ordered_map(run, list(starts), workers))
