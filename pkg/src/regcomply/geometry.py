"""Exact descent-cone areas on the unit sphere of R^3 for weighted l1 norms."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import DomainError, WeightVector

SPHERE_AREA_3D = 4.0 * math.pi


class DegenerateConeError(DomainError):
    """Raised when the generators of a simplicial cone are coplanar."""


@dataclass(frozen=True)
class Mu3:
    """Inverse weights ``mu_i = 1 / w_i`` of a weighted l1 norm on R^3."""

    mu: tuple[float, float, float]

    def __post_init__(self):
        mu = tuple(float(m) for m in self.mu)
        if len(mu) != 3:
            raise DomainError("Mu3 needs exactly three entries")
        if not all(math.isfinite(m) and m > 0 for m in mu):
            raise DomainError(f"inverse weights must be finite and positive, got {mu}")
        object.__setattr__(self, "mu", mu)

    @classmethod
    def from_weights(cls, w: WeightVector) -> Mu3:
        if w.n != 3:
            raise DomainError(f"expected 3 weights, got {w.n}")
        return cls(tuple(w.mu))

    def __getitem__(self, i):
        return self.mu[i]


@dataclass(frozen=True)
class SolidAngle:
    """A solid angle in steradians."""

    value: float

    def __post_init__(self):
        if not (0.0 <= self.value <= SPHERE_AREA_3D + 1e-12):
            raise DomainError(f"solid angle out of range: {self.value}")

    def __float__(self):
        return self.value

    @property
    def fraction(self) -> float:
        """Share of the full sphere."""
        return self.value / SPHERE_AREA_3D


def _as_mu3(mu) -> Mu3:
    if isinstance(mu, Mu3):
        return mu
    if isinstance(mu, WeightVector):
        return Mu3.from_weights(mu)
    return Mu3(tuple(mu))


def beta(i: int, j: int, mu) -> float:
    """Cosine of the tetrahedron angle ``alpha_ij``: ``(1 + (mu_j / mu_i)^2)^(-1/2)``."""
    if i == j:
        raise DomainError("beta(i, i) is the product of the off-diagonal betas; use c_published")
    mu = _as_mu3(mu)
    return (1.0 + (mu[j] / mu[i]) ** 2) ** -0.5


def c_published(i: int, mu) -> float:
    """``1 + sum_{j != i} beta_ij + prod_{j != i} beta_ij`` in the published closed form for the cone area."""
    mu = _as_mu3(mu)
    b = [beta(i, j, mu) for j in range(3) if j != i]
    return 1.0 + b[0] + b[1] + b[0] * b[1]


def published_cone_area(i: int, mu) -> float:
    """Area ``4 atan(1 / (1 + c_i))`` of the published closed form (unit numerator, no triple product)."""
    return 4.0 * math.atan(1.0 / (1.0 + c_published(i, mu)))


def tetra_solid_angle(a, b, c) -> SolidAngle:
    """Solid angle of the cone spanned by three vectors (van Oosterom and Strackee).

    ``tan(omega / 2) = |det[a b c]| / (1 + a.b + b.c + c.a)`` for unit ``a, b, c``.
    """
    vecs = []
    for v in (a, b, c):
        v = np.asarray(v, dtype=float).reshape(-1)
        if v.size != 3:
            raise DomainError("tetra_solid_angle expects vectors in R^3")
        norm = np.linalg.norm(v)
        if norm == 0:
            raise DegenerateConeError("zero generator")
        vecs.append(v / norm)
    a, b, c = vecs
    det = abs(float(np.dot(a, np.cross(b, c))))
    if det < 1e-14:
        raise DegenerateConeError("coplanar generators")
    denom = 1.0 + float(a @ b + b @ c + c @ a)
    return SolidAngle(2.0 * math.atan2(det, denom))


def descent_cone_generators(w: WeightVector, axis: int, sign: int = 1) -> list[np.ndarray]:
    """Extreme rays ``+-mu_j e_j - sign mu_i e_i`` of the descent cone at ``sign * e_axis``."""
    if w.n != 3:
        raise DomainError(f"expected 3 weights, got {w.n}")
    if axis not in (0, 1, 2):
        raise DomainError(f"axis must be 0, 1 or 2, got {axis}")
    if sign not in (-1, 1):
        raise DomainError("sign must be +1 or -1")
    mu = w.mu
    e = np.eye(3)
    base = -sign * mu[axis] * e[axis]
    rays = []
    for j in range(3):
        if j != axis:
            rays.append(mu[j] * e[j] + base)
            rays.append(-mu[j] * e[j] + base)
    return rays


def descent_cone_area_3d(w: WeightVector, axis: int, sign: int = 1) -> SolidAngle:
    """Area of the descent cone at ``sign * e_axis`` intersected with the unit sphere.

    The cone splits into four congruent simplicial cones, one per choice of
    signs on the two off-axis coordinates; each shares the ray ``-sign e_axis``.
    """
    if w.n != 3:
        raise DomainError(f"expected 3 weights, got {w.n}")
    if axis not in (0, 1, 2):
        raise DomainError(f"axis must be 0, 1 or 2, got {axis}")
    if sign not in (-1, 1):
        raise DomainError("sign must be +1 or -1")
    mu = w.mu
    j, l = (x for x in range(3) if x != axis)
    e = np.eye(3)
    base = -sign * mu[axis] * e[axis]
    quarter = tetra_solid_angle(mu[j] * e[j] + base, mu[l] * e[l] + base, base)
    return SolidAngle(4.0 * quarter.value)


def cone_areas_3d(w: WeightVector) -> np.ndarray:
    """Per-axis descent-cone areas (sign-independent)."""
    return np.array([descent_cone_area_3d(w, i).value for i in range(3)])


def compliance_uniform_3d(w: WeightVector) -> float:
    """``1 - vol(T(Sigma_1) cap S) / vol(S)`` summing the six signed axis cones."""
    total = 2.0 * cone_areas_3d(w).sum()
    return 1.0 - total / SPHERE_AREA_3D


def compliance_nonuniform_3d(w: WeightVector) -> float:
    """``1 - max_x vol(T(x) cap S) / vol(S)`` over 1-sparse ``x``."""
    return 1.0 - cone_areas_3d(w).max() / SPHERE_AREA_3D
