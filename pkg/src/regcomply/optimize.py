"""Search over weight vectors for the best compliance, and optimality certificates."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from ._workers import ordered_map
from .geometry import compliance_nonuniform_3d, compliance_uniform_3d
from .model import DomainError, SparsityModel, WeightVector, normalize_weights
from .rip import delta_nec, delta_suff
from .sampling import mc_compliance
from .search import CERTIFICATE_SEARCH, LIGHT_SEARCH, SearchConfig, nelder_mead_max

OPT_MEASURES = ("U3", "NU3", "rip-nec", "rip-suff", "mc-U", "mc-NU")

# Weights are kept away from 0, where descent cones degenerate into half-spaces.
WEIGHT_FLOOR = 0.05
MC_SAMPLES = 200_000


@dataclass(frozen=True)
class MeasureSpec:
    """A compliance measure plus the settings needed to evaluate it."""

    name: str
    model: SparsityModel
    inner: SearchConfig = LIGHT_SEARCH
    samples: int = MC_SAMPLES
    seed: int = 0
    workers: int | None = None

    def __post_init__(self):
        if self.name not in OPT_MEASURES:
            raise DomainError(f"unknown measure {self.name!r}; expected one of {OPT_MEASURES}")
        if self.name in ("U3", "NU3") and (self.model.n != 3 or self.model.k != 1):
            raise DomainError(f"{self.name} needs n = 3 and k = 1")

    def evaluate(self, w: WeightVector) -> tuple[float, np.ndarray | None]:
        """Measure value (larger is better) and a witness when one exists."""
        if self.name == "U3":
            return compliance_uniform_3d(w), None
        if self.name == "NU3":
            return compliance_nonuniform_3d(w), None
        if self.name == "rip-nec":
            r = delta_nec(w, self.model, self.inner, workers=1)
            return r.value, r.witness
        if self.name == "rip-suff":
            r = delta_suff(w, self.model, self.inner, workers=1)
            return r.value, r.witness
        mode = "U" if self.name == "mc-U" else "NU"
        # common random numbers: the same seed for every w keeps comparisons smooth
        est = mc_compliance(w, self.model, mode, self.samples, self.seed, workers=1)
        return est.estimate, None


@dataclass
class OptimizationTrace:
    measure: str
    best_w: WeightVector
    best_value: float
    history: list[tuple[int, list[float], float]] = field(default_factory=list)
    evaluations: int = 0
    budget_exhausted: bool = False

    def to_dict(self) -> dict:
        return {
            "measure": self.measure,
            "best_w": self.best_w.tolist(),
            "best_value": self.best_value,
            "history": [{"iteration": i, "w": w, "value": v} for i, w, v in self.history],
            "evaluations": self.evaluations,
            "budget_exhausted": self.budget_exhausted,
        }


def weight_grid(n: int, steps: int) -> list[WeightVector]:
    """Normalized weights with ``w_0 = 1`` and the rest non-increasing on a uniform grid.

    Measures are invariant under permutations of the weights, so sorted
    vectors cover every grid cell. The all-ones vector comes first.
    """
    levels = np.linspace(1.0, WEIGHT_FLOOR, steps) if steps > 1 else np.array([1.0])
    out = []
    for idx in itertools.combinations_with_replacement(range(levels.size), n - 1):
        out.append(WeightVector(np.concatenate([[1.0], levels[list(idx)]])))
    return out


def _weights_from_free(x) -> WeightVector:
    x = np.clip(np.asarray(x, dtype=float), WEIGHT_FLOOR, 1.0)
    return normalize_weights(np.concatenate([[1.0], x]))


def optimize_weights(
    measure: str,
    model: SparsityModel,
    config: SearchConfig | None = None,
    *,
    inner: SearchConfig = LIGHT_SEARCH,
    samples: int = MC_SAMPLES,
    refine_top: int = 3,
    workers: int | None = None,
) -> OptimizationTrace:
    """Coarse grid over sorted normalized weights, then bounded Nelder-Mead from the best cells."""
    config = config or SearchConfig(restarts=refine_top)
    spec = MeasureSpec(measure, model, inner, samples, config.seed)
    grid = weight_grid(model.n, config.grid_steps)
    values = ordered_map(lambda w: spec.evaluate(w)[0], grid, workers)

    trace = OptimizationTrace(measure, grid[0], -np.inf)
    for i, (w, v) in enumerate(zip(grid, values)):
        if v > trace.best_value:
            trace.best_w, trace.best_value = w, v
            trace.history.append((i, w.tolist(), v))
    trace.evaluations = len(grid)
    if model.n == 1:
        return trace

    ranked = sorted(range(len(grid)), key=lambda i: (-values[i], i))[:refine_top]
    bounds = [(WEIGHT_FLOOR, 1.0)] * (model.n - 1)

    def refine(i):
        x0 = grid[i].w[1:]
        value, x, nfev = nelder_mead_max(
            lambda x: spec.evaluate(_weights_from_free(x))[0], x0, config.max_iters, config.tolerance, bounds
        )
        return value, x, nfev

    step = len(grid)
    for value, x, nfev in ordered_map(refine, ranked, workers):
        trace.evaluations += nfev
        step += nfev
        if nfev >= 2 * config.max_iters:
            trace.budget_exhausted = True
        w = _weights_from_free(x)
        value = spec.evaluate(w)[0]
        if value > trace.best_value:
            trace.best_w, trace.best_value = w, value
            trace.history.append((step, w.tolist(), value))
    return trace


# --- certificates --------------------------------------------------------------


@dataclass
class Violation:
    w: list[float]
    value: float
    witness: list[float] | None

    def to_dict(self) -> dict:
        return {"w": self.w, "value": self.value, "witness": self.witness}


@dataclass
class CertificateReport:
    measure: str
    candidate: list[float]
    candidate_value: float
    trials: int
    seed: int
    violations: list[Violation]
    min_margin: float
    mean_margin: float

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {
            "measure": self.measure,
            "candidate": self.candidate,
            "candidate_value": self.candidate_value,
            "trials": self.trials,
            "seed": self.seed,
            "violations": len(self.violations),
            "violation_details": [v.to_dict() for v in self.violations],
            "min_margin": self.min_margin,
            "mean_margin": self.mean_margin,
            "passed": self.passed,
        }


def random_weights(n: int, trials: int, seed: int, max_min_weight: float = 0.95, exclude=None) -> list[WeightVector]:
    """Seeded random normalized weights, each with some coordinate at most ``max_min_weight``."""
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(7,)))
    out = []
    while len(out) < trials:
        w = normalize_weights(rng.uniform(WEIGHT_FLOOR, 1.0, n))
        if w.w.min() > max_min_weight or (exclude is not None and w == exclude):
            continue
        out.append(w)
    return out


def optimality_certificate(
    measure: str,
    w_candidate: WeightVector,
    model: SparsityModel,
    trials: int = 200,
    seed: int = 0,
    *,
    inner: SearchConfig = CERTIFICATE_SEARCH,
    samples: int = MC_SAMPLES,
    max_min_weight: float = 0.95,
    workers: int | None = None,
) -> CertificateReport:
    """Check ``measure(w) < measure(w_candidate)`` on ``trials`` random weight vectors.

    A trial where the random weights match or beat the candidate is a violation.
    """
    if trials < 1:
        raise DomainError("trials must be >= 1")
    spec = MeasureSpec(measure, model, inner, samples, seed)
    ref, _ = spec.evaluate(w_candidate)
    ws = random_weights(model.n, trials, seed, max_min_weight, exclude=w_candidate)
    results = ordered_map(spec.evaluate, ws, workers)
    margins = np.array([ref - v for v, _ in results])
    violations = [
        Violation(w.tolist(), v, None if z is None else [float(t) for t in z])
        for w, (v, z), m in zip(ws, results, margins)
        if not m > 0
    ]
    return CertificateReport(
        measure, w_candidate.tolist(), ref, trials, seed, violations, float(margins.min()), float(margins.mean())
    )
