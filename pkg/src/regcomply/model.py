"""Domain types and descent-set membership predicates.

Indices are 0-based throughout the library. Every predicate accepts either a
single vector of shape ``(n,)`` (returns ``bool``) or a batch of row vectors
of shape ``(m, n)`` (returns a boolean array of length ``m``).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

# Relative slack used by the membership predicates so that points built to sit
# exactly on a cone boundary are not rejected by rounding.
BOUNDARY_RTOL = 1e-12


class DomainError(ValueError):
    """Raised when an input violates a mathematical precondition."""


@dataclass(frozen=True)
class WeightVector:
    """Positive weights in normalized form (``max(w) == 1``)."""

    w: np.ndarray

    def __post_init__(self):
        w = np.array(self.w, dtype=float).reshape(-1)
        if w.size == 0:
            raise DomainError("weight vector must have at least one entry")
        if not np.all(np.isfinite(w)) or np.any(w <= 0):
            raise DomainError(f"weights must be finite and positive, got {w}")
        if w.max() != 1.0:
            raise DomainError("weights must be normalized so that max(w) == 1; use normalize_weights")
        w.setflags(write=False)
        object.__setattr__(self, "w", w)

    @property
    def n(self) -> int:
        return int(self.w.size)

    @property
    def mu(self) -> np.ndarray:
        """Inverse weights."""
        return 1.0 / self.w

    @classmethod
    def ones(cls, n: int) -> WeightVector:
        return cls(np.ones(n))

    def is_ones(self) -> bool:
        return bool(np.all(self.w == 1.0))

    def tolist(self) -> list[float]:
        return [float(x) for x in self.w]

    def __eq__(self, other):
        if not isinstance(other, WeightVector):
            return NotImplemented
        return np.array_equal(self.w, other.w)

    def __hash__(self):
        return hash(self.w.tobytes())

    def __len__(self):
        return self.n


def normalize_weights(raw) -> WeightVector:
    """Scale positive weights so that the largest equals one."""
    raw = np.asarray(raw, dtype=float).reshape(-1)
    if raw.size == 0:
        raise DomainError("weight vector must have at least one entry")
    if not np.all(np.isfinite(raw)) or np.any(raw <= 0):
        raise DomainError(f"weights must be finite and positive, got {raw}")
    w = raw / raw.max()
    # Division by the max is exact for that entry, but pin it anyway.
    w[np.argmax(raw)] = 1.0
    return WeightVector(w)


@dataclass(frozen=True)
class SparsityModel:
    """The model of ``k``-sparse vectors in dimension ``n``."""

    n: int
    k: int

    def __post_init__(self):
        if int(self.n) != self.n or int(self.k) != self.k:
            raise DomainError("n and k must be integers")
        if self.n < 1:
            raise DomainError(f"n must be >= 1, got {self.n}")
        if self.k < 1:
            raise DomainError(f"k must be >= 1, got {self.k}")
        if self.undersized:
            warnings.warn(
                f"n={self.n} < 2k={2 * self.k}: optimality results assume n >= 2k",
                stacklevel=3,
            )

    @property
    def undersized(self) -> bool:
        """True when ``n < 2k``, outside the range where l1 optimality holds."""
        return self.n < 2 * self.k


@dataclass(frozen=True)
class SignedSupport:
    """A support set with a sign per index; identifies a face of the weighted l1 ball."""

    indices: tuple[int, ...]
    signs: tuple[int, ...]

    def __post_init__(self):
        idx = tuple(int(i) for i in self.indices)
        sg = tuple(int(s) for s in self.signs)
        if len(idx) != len(sg):
            raise DomainError("indices and signs must have the same length")
        if len(set(idx)) != len(idx):
            raise DomainError(f"support indices must be distinct, got {idx}")
        if any(i < 0 for i in idx):
            raise DomainError("support indices must be nonnegative")
        if any(s not in (-1, 1) for s in sg):
            raise DomainError("signs must be +1 or -1")
        object.__setattr__(self, "indices", idx)
        object.__setattr__(self, "signs", sg)

    @classmethod
    def positive(cls, indices) -> SignedSupport:
        indices = tuple(indices)
        return cls(indices, (1,) * len(indices))

    def __len__(self):
        return len(self.indices)

    def check(self, n: int, k: int | None = None):
        if any(i >= n for i in self.indices):
            raise DomainError(f"support {self.indices} out of range for n={n}")
        if k is not None and len(self.indices) > k:
            raise DomainError(f"support of size {len(self.indices)} exceeds sparsity k={k}")


def magnitude_order(a: np.ndarray) -> np.ndarray:
    """Permutation sorting ``a`` descending along the last axis, ties to the lowest index."""
    return np.argsort(-a, axis=-1, kind="stable")


@dataclass(frozen=True)
class SortedMagnitudeView:
    """Magnitudes of ``z`` sorted descending, with the top-k and top-2k supports."""

    z: np.ndarray
    k: int
    perm: np.ndarray = field(init=False)

    def __post_init__(self):
        z = np.asarray(self.z, dtype=float).reshape(-1)
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "perm", magnitude_order(np.abs(z)))

    @property
    def sorted_magnitudes(self) -> np.ndarray:
        return np.abs(self.z)[self.perm]

    @property
    def top(self) -> np.ndarray:
        """Indices of the ``k`` largest magnitudes (T)."""
        return np.sort(self.perm[: self.k])

    @property
    def top2(self) -> np.ndarray:
        """Indices of the ``2k`` largest magnitudes (T2)."""
        return np.sort(self.perm[: 2 * self.k])


def _as_batch(z, n: int) -> tuple[np.ndarray, bool]:
    z = np.asarray(z, dtype=float)
    single = z.ndim == 1
    z2 = np.atleast_2d(z)
    if z2.ndim != 2 or z2.shape[1] != n:
        raise DomainError(f"dimension mismatch: expected vectors of length {n}, got shape {z.shape}")
    return z2, single


def weighted_l1(z, w: WeightVector):
    """``sum_i w_i |z_i|`` (row-wise for a batch)."""
    z2, single = _as_batch(z, w.n)
    out = np.abs(z2) @ w.w
    return float(out[0]) if single else out


def signed_descent_cone_contains(w: WeightVector, s: SignedSupport, z):
    """Membership of ``z`` in the descent cone of ``||.||_w`` at sign pattern ``s``.

    ``z`` belongs iff ``sum_{j not in S} w_j |z_j| <= -sum_{j in S} w_j s_j z_j``.
    """
    s.check(w.n)
    z2, single = _as_batch(z, w.n)
    on = np.zeros(w.n, dtype=bool)
    idx = np.array(s.indices, dtype=int)
    on[idx] = True
    signed_w = np.zeros(w.n)
    signed_w[idx] = w.w[idx] * np.array(s.signs, dtype=float)
    off_mass = np.abs(z2[:, ~on]) @ w.w[~on]
    pull = -(z2 @ signed_w)
    scale = np.abs(z2) @ w.w
    out = off_mass <= pull + BOUNDARY_RTOL * scale
    return bool(out[0]) if single else out


def best_support(z, w: WeightVector, k: int) -> np.ndarray:
    """Indices of the ``k`` largest ``w_i |z_i|`` (ties to the lowest index), sorted."""
    z2, single = _as_batch(z, w.n)
    order = magnitude_order(np.abs(z2) * w.w)[:, :k]
    order = np.sort(order, axis=1)
    return order[0] if single else order


def model_descent_set_contains(w: WeightVector, model: SparsityModel, z):
    """Membership of ``z`` in the union of descent cones over all ``k``-sparse points.

    Holds iff some support ``H`` with ``|H| = k`` has ``||z_H||_w >= ||z_{H^c}||_w``;
    the best ``H`` collects the ``k`` largest values of ``w_i |z_i|``.
    """
    if model.n != w.n:
        raise DomainError(f"model dimension {model.n} does not match weights dimension {w.n}")
    z2, single = _as_batch(z, w.n)
    wz = np.abs(z2) * w.w
    k = min(model.k, w.n)
    total = wz.sum(axis=1)
    head = -np.partition(-wz, k - 1, axis=1)[:, :k].sum(axis=1)
    out = head >= (total - head) - BOUNDARY_RTOL * total
    return bool(out[0]) if single else out
