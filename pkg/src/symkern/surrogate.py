"""Gradient Hermite-Birkhoff interpolation in the native kernel space.

The data are first-derivative point evaluations lambda(f) = d/dx_a f(x);
their Riesz representers are derivative slices of the kernel, and the
minimum-norm interpolant is a linear combination of those representers
with coefficients from the generalized Gram system.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, DuplicateFunctional, EmptyDataset
from .kernels import (
    KernelSpec,
    grad2_accumulate,
    kernel_mixed2,
    mixed2_accumulate,
    mixed2_accumulate_precise,
    mixed2_field,
    mixed2_self,
)
from .linalg import cholesky_solve

SERIAL_VERSION = 1


@dataclass(frozen=True)
class DerivFunctional:
    """First-derivative point evaluation f -> d/dx_coord f(center)."""

    center: np.ndarray
    coord: int

    def __post_init__(self):
        c = np.asarray(self.center, dtype=float)
        if c.ndim != 1 or not np.all(np.isfinite(c)):
            raise ValueError("center must be a finite 1-d point")
        object.__setattr__(self, "center", c)
        if not (0 <= self.coord < c.size):
            raise ValueError(f"coord {self.coord} outside dimension {c.size}")

    def key(self):
        return (tuple(self.center.tolist()), int(self.coord))


def _functional_arrays(functionals):
    """Stack a functional sequence into (centers, coords) arrays."""
    if len(functionals) == 0:
        raise EmptyDataset("empty functional list")
    centers = np.stack([f.center for f in functionals])
    coords = np.array([f.coord for f in functionals], dtype=int)
    if len({f.center.size for f in functionals}) != 1:
        raise DimensionMismatch("functionals have inconsistent dimensions")
    return centers, coords


@dataclass
class Surrogate:
    """Kernel expansion s(x) = sum_j c_j d/dy_{a_j} k(x, x_j)."""

    kernel: KernelSpec
    centers: np.ndarray        # (m, dim)
    coords: np.ndarray         # (m,) int
    coeffs: np.ndarray         # (m,)
    dim: int

    @staticmethod
    def empty(kernel: KernelSpec, dim: int) -> "Surrogate":
        return Surrogate(kernel, np.zeros((0, dim)), np.zeros(0, dtype=int), np.zeros(0), dim)

    @staticmethod
    def from_functionals(kernel, functionals, coeffs) -> "Surrogate":
        centers, coords = _functional_arrays(functionals)
        coeffs = np.asarray(coeffs, dtype=float)
        if coeffs.size != coords.size:
            raise DimensionMismatch("coefficient count does not match functional count")
        return Surrogate(kernel, centers, coords, coeffs, centers.shape[1])

    @property
    def size(self) -> int:
        return int(self.coeffs.size)

    def functionals(self):
        return [DerivFunctional(c, int(a)) for c, a in zip(self.centers, self.coords)]

    def _check_point(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dim,):
            raise DimensionMismatch(f"point shape {x.shape} does not match dim {self.dim}")
        return x

    def value(self, x) -> float:
        x = self._check_point(x)
        if self.size == 0:
            return 0.0
        return float(grad2_accumulate(self.kernel, x[None, :], self.centers, self.coords,
                                      self.coeffs)[0])

    def gradient(self, x):
        x = self._check_point(x)
        if self.size == 0:
            return np.zeros(self.dim)
        return mixed2_accumulate(self.kernel, x[None, :], self.centers, self.coords,
                                 self.coeffs)[0]

    def gradient_precise(self, x):
        """Gradient with extended-precision accumulation.

        Worth its cost only where rounding noise matters: the implicit
        predictor solves and finite-difference structure checks.
        """
        x = self._check_point(x)
        if self.size == 0:
            return np.zeros(self.dim)
        return mixed2_accumulate_precise(self.kernel, x, self.centers, self.coords,
                                         self.coeffs)

    def value_many(self, X):
        X = np.asarray(X, dtype=float)
        if self.size == 0:
            return np.zeros(X.shape[0])
        return grad2_accumulate(self.kernel, X, self.centers, self.coords, self.coeffs)

    def gradient_many(self, X):
        """Gradients at the rows of X, returned as an (M x dim) array."""
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or X.shape[1] != self.dim:
            raise DimensionMismatch(f"expected (M, {self.dim}) array, got {X.shape}")
        if self.size == 0:
            return np.zeros_like(X)
        return mixed2_accumulate(self.kernel, X, self.centers, self.coords, self.coeffs)


@dataclass
class HBDataset:
    """One-step flow data: mixed inputs and difference-quotient targets."""

    inputs: np.ndarray         # (M, 2n)
    targets: np.ndarray        # (M, 2n)
    delta_t: float
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.inputs = np.asarray(self.inputs, dtype=float)
        self.targets = np.asarray(self.targets, dtype=float)
        if self.inputs.shape != self.targets.shape or self.inputs.ndim != 2:
            raise DimensionMismatch(
                f"inputs {self.inputs.shape} and targets {self.targets.shape} must match"
            )
        if not np.all(np.isfinite(self.inputs)) or not np.all(np.isfinite(self.targets)):
            raise ValueError("non-finite dataset entries rejected")
        if not self.delta_t > 0:
            raise ValueError("delta_t must be positive")

    @property
    def count(self) -> int:
        return self.inputs.shape[0]

    @property
    def dim(self) -> int:
        return self.inputs.shape[1]


def gram_matrix(kernel: KernelSpec, functionals):
    """Generalized Gram matrix G[i, j] = d1_{a_i} d2_{a_j} k(x_i, x_j).

    The upper triangle is computed and mirrored, so G is symmetric to the
    bit.
    """
    centers, coords = _functional_arrays(functionals)
    m = coords.size
    G = np.empty((m, m))
    idx = np.arange(m)
    for i in range(m):
        F = mixed2_field(kernel, centers, centers[i], int(coords[i]))
        G[i, :] = F[idx, coords]
    upper = np.triu(G)
    return upper + np.triu(G, 1).T


def fit(kernel: KernelSpec, functionals, targets) -> Surrogate:
    """Minimum-norm interpolant of the derivative data.

    Solves the generalized Gram system; duplicate (center, coord) pairs are
    rejected because they make the system singular by construction.
    """
    targets = np.asarray(targets, dtype=float)
    if targets.ndim != 1 or targets.size != len(functionals):
        raise DimensionMismatch("targets must be one value per functional")
    keys = [f.key() for f in functionals]
    if len(set(keys)) != len(keys):
        raise DuplicateFunctional("duplicate (center, coord) pairs in functional list")
    G = gram_matrix(kernel, functionals)
    coeffs = cholesky_solve(G, targets)
    return Surrogate.from_functionals(kernel, functionals, coeffs)


def power_function(kernel: KernelSpec, selected, query: DerivFunctional) -> float:
    """Norm of the part of the query representer orthogonal to the selection.

    The squared value is the self Gram value minus the projection term
    v' G^-1 v; roundoff can push it a hair below zero, so it is clamped.
    """
    p0 = mixed2_self(kernel)
    if len(selected) == 0:
        return float(np.sqrt(p0))
    centers, coords = _functional_arrays(selected)
    F = mixed2_field(kernel, centers, query.center, int(query.coord))
    v = F[np.arange(coords.size), coords]
    G = gram_matrix(kernel, selected)
    proj = float(v @ cholesky_solve(G, v))
    return float(np.sqrt(max(p0 - proj, 0.0)))


def rkhs_inner(kernel: KernelSpec, sa: Surrogate, sb: Surrogate) -> float:
    """Native-space inner product of two derivative expansions."""
    if sa.dim != sb.dim:
        raise DimensionMismatch(f"dimension mismatch: {sa.dim} vs {sb.dim}")
    if sa.kernel != sb.kernel:
        raise ValueError("surrogates must share one kernel")
    if sa.size == 0 or sb.size == 0:
        return 0.0
    idx = np.arange(sa.size)
    total = 0.0
    for j in range(sb.size):
        F = mixed2_field(kernel, sa.centers, sb.centers[j], int(sb.coords[j]))
        total += float(sa.coeffs @ F[idx, sa.coords]) * sb.coeffs[j]
    return total


def rkhs_norm(kernel: KernelSpec, s: Surrogate) -> float:
    return float(np.sqrt(max(rkhs_inner(kernel, s, s), 0.0)))


def surrogate_to_dict(s: Surrogate, delta_t: float) -> dict:
    """Versioned plain-dict form of a trained surrogate (JSON-ready)."""
    return {
        "version": SERIAL_VERSION,
        "kernel": s.kernel.to_dict(),
        "dim": int(s.dim),
        "delta_T": float(delta_t),
        "functionals": [
            {"center": [float(v) for v in c], "coord": int(a)}
            for c, a in zip(s.centers, s.coords)
        ],
        "coeffs": [float(c) for c in s.coeffs],
    }


def surrogate_from_dict(doc: dict):
    """Inverse of surrogate_to_dict; returns (surrogate, delta_t)."""
    if doc.get("version") != SERIAL_VERSION:
        raise ValueError(f"unsupported model version {doc.get('version')!r}")
    kernel = KernelSpec.from_dict(doc["kernel"])
    dim = int(doc["dim"])
    funcs = doc["functionals"]
    if funcs:
        centers = np.array([f["center"] for f in funcs], dtype=float)
        coords = np.array([f["coord"] for f in funcs], dtype=int)
    else:
        centers = np.zeros((0, dim))
        coords = np.zeros(0, dtype=int)
    coeffs = np.asarray(doc["coeffs"], dtype=float)
    s = Surrogate(kernel, centers, coords, coeffs, dim)
    return s, float(doc["delta_T"])
