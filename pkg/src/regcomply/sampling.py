"""Monte Carlo estimation of descent-cone volumes on the unit sphere of R^n.

Samples are produced in fixed-size blocks. Block ``b`` is drawn from a Philox
generator keyed by the seed with its counter offset by ``b``, so any sample is
a function of ``(seed, index)`` alone and results do not depend on how the
blocks are spread over workers.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, Iterator, Literal

import numpy as np

from ._workers import ordered_map
from .model import (
    DomainError,
    SignedSupport,
    SparsityModel,
    WeightVector,
    model_descent_set_contains,
    signed_descent_cone_contains,
)

BLOCK_SIZE = 1 << 16
DEFAULT_SAMPLES = 1_000_000
DEFAULT_SUPPORT_CAP = 4096
_SEED_MASK = (1 << 64) - 1


class CapacityError(RuntimeError):
    """Raised when an enumeration exceeds its configured cap and no fallback is allowed."""


@dataclass(frozen=True)
class EstimateWithError:
    estimate: float
    std_error: float
    samples: int
    seed: int

    def __post_init__(self):
        if not 0.0 <= self.estimate <= 1.0:
            raise ValueError(f"estimate out of [0, 1]: {self.estimate}")

    @classmethod
    def from_hits(cls, hits: int, samples: int, seed: int, complement: bool = False) -> EstimateWithError:
        p = hits / samples
        se = math.sqrt(p * (1.0 - p) / samples)
        return cls(1.0 - p if complement else p, se, samples, seed)

    def within(self, value: float, sigmas: float = 3.0) -> bool:
        return abs(self.estimate - value) <= sigmas * self.std_error

    def to_dict(self) -> dict:
        return {"estimate": self.estimate, "std_error": self.std_error, "samples": self.samples, "seed": self.seed}


def _block_generator(seed: int, block: int) -> np.random.Generator:
    # counter word 2 carries the block index; draws within a block only
    # advance word 0, so blocks never overlap.
    bitgen = np.random.Philox(key=seed & _SEED_MASK, counter=[0, 0, block, 0])
    return np.random.Generator(bitgen)


def _sphere_block(n: int, seed: int, block: int, size: int) -> np.ndarray:
    rng = _block_generator(seed, block)
    x = rng.standard_normal((size, n))
    norms = np.linalg.norm(x, axis=1)
    bad = norms == 0
    while np.any(bad):
        x[bad] = rng.standard_normal((int(bad.sum()), n))
        norms[bad] = np.linalg.norm(x[bad], axis=1)
        bad = norms == 0
    return x / norms[:, None]


def _blocks(count: int, block_size: int) -> list[tuple[int, int]]:
    nblocks = -(-count // block_size)
    return [(b, min(block_size, count - b * block_size)) for b in range(nblocks)]


def iter_sphere(n: int, count: int, seed: int, block_size: int = BLOCK_SIZE) -> Iterator[np.ndarray]:
    """Yield blocks of i.i.d. uniform points on the unit sphere of R^n."""
    if n < 1 or count < 1:
        raise DomainError(f"need n >= 1 and count >= 1, got n={n}, count={count}")
    for b, size in _blocks(count, block_size):
        yield _sphere_block(n, seed, b, size)


def sample_sphere(n: int, count: int, seed: int, block_size: int = BLOCK_SIZE) -> np.ndarray:
    """``count`` uniform points on the unit sphere of R^n as a ``(count, n)`` array."""
    return np.concatenate(list(iter_sphere(n, count, seed, block_size)), axis=0)


def count_hits(
    predicates: Callable[[np.ndarray], np.ndarray] | list[Callable[[np.ndarray], np.ndarray]],
    n: int,
    count: int,
    seed: int,
    workers: int | None = None,
    block_size: int = BLOCK_SIZE,
) -> np.ndarray:
    """Number of sphere samples accepted by each predicate (all share the same samples)."""
    if n < 1 or count < 1:
        raise DomainError(f"need n >= 1 and count >= 1, got n={n}, count={count}")
    preds = predicates if isinstance(predicates, list) else [predicates]

    def run(block):
        b, size = block
        x = _sphere_block(n, seed, b, size)
        return np.array([int(np.count_nonzero(p(x))) for p in preds], dtype=np.int64)

    partial = ordered_map(run, _blocks(count, block_size), workers)
    return np.sum(partial, axis=0)


def estimate_cone_fraction(
    predicate: Callable[[np.ndarray], np.ndarray],
    n: int,
    count: int = DEFAULT_SAMPLES,
    seed: int = 0,
    workers: int | None = None,
) -> EstimateWithError:
    """Fraction of the sphere where a vectorized predicate holds, with its binomial error."""
    hits = int(count_hits(predicate, n, count, seed, workers)[0])
    return EstimateWithError.from_hits(hits, count, seed)


def signed_supports(n: int, k: int) -> Iterator[SignedSupport]:
    for idx in itertools.combinations(range(n), k):
        for signs in itertools.product((1, -1), repeat=k):
            yield SignedSupport(idx, signs)


def heaviest_support(w: WeightVector, k: int) -> SignedSupport:
    """Positive support on the ``k`` largest weights, where the descent cone is widest."""
    idx = np.sort(np.argsort(-w.w, kind="stable")[:k])
    return SignedSupport.positive(idx)


def mc_compliance(
    w: WeightVector,
    model: SparsityModel,
    mode: Literal["U", "NU"] = "U",
    count: int = DEFAULT_SAMPLES,
    seed: int = 0,
    *,
    support_cap: int = DEFAULT_SUPPORT_CAP,
    sampled_supports: int | None = None,
    workers: int | None = None,
) -> EstimateWithError:
    """Monte Carlo estimate of the uniform (``U``) or non-uniform (``NU``) compliance.

    ``NU`` takes the worst signed ``k``-support. Supports are enumerated when
    ``C(n, k) 2^k <= support_cap``; beyond that, the heaviest-weight support and
    ``sampled_supports`` random ones are tried, and ``CapacityError`` is raised
    if sampling is disabled (``sampled_supports=None``).
    """
    if model.n != w.n:
        raise DomainError(f"model dimension {model.n} does not match weights dimension {w.n}")
    if mode == "U":
        hits = count_hits(lambda x: model_descent_set_contains(w, model, x), w.n, count, seed, workers)
        return EstimateWithError.from_hits(int(hits[0]), count, seed, complement=True)
    if mode != "NU":
        raise DomainError(f"mode must be 'U' or 'NU', got {mode!r}")

    k = min(model.k, w.n)
    total = math.comb(w.n, k) * 2**k
    if total <= support_cap:
        supports = list(signed_supports(w.n, k))
    elif sampled_supports is None:
        raise CapacityError(f"{total} signed supports exceed the cap {support_cap} and sampling is disabled")
    else:
        rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(1,)))
        supports = [heaviest_support(w, k)]
        for _ in range(sampled_supports):
            idx = np.sort(rng.choice(w.n, size=k, replace=False))
            signs = rng.choice([-1, 1], size=k)
            supports.append(SignedSupport(tuple(idx), tuple(signs)))

    preds = [lambda x, s=s: signed_descent_cone_contains(w, s, x) for s in supports]
    hits = count_hits(preds, w.n, count, seed, workers)
    return EstimateWithError.from_hits(int(hits.max()), count, seed, complement=True)
