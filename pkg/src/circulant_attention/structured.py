"""Circulant and BCCB matrices in first-row form, and projection onto BCCB.

A BCCB matrix on an ``H x W`` grid is determined by its first row ``b`` (length
``N = H*W``)::

    B[(ix, iy), (jx, jy)] = b[((jx - ix) % H) * W + (jy - iy) % W]

The matrices ``B_k`` whose first row is the one-hot ``e_k`` form an orthogonal
basis of the BCCB subspace with ``<B_k, B_k> = N``. Projecting an arbitrary
``A`` therefore reduces to averaging ``A`` over each offset class.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ShapeMismatch, TooLarge
from .spectral import GridShape

MAX_DENSE_N = 4096


@dataclass(frozen=True)
class CirculantKernel:
    c: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "c", np.asarray(self.c, dtype=np.float64).ravel())

    @property
    def n(self) -> int:
        return self.c.size

    def materialize(self) -> np.ndarray:
        n = self.n
        idx = (np.arange(n)[None, :] - np.arange(n)[:, None]) % n
        return self.c[idx]


@dataclass(frozen=True)
class BccbKernel:
    """First row ``b`` of a BCCB matrix plus its grid shape."""

    b: np.ndarray
    shape: GridShape

    def __post_init__(self):
        b = np.asarray(self.b, dtype=np.float64).ravel()
        if b.size != self.shape.N:
            raise ShapeMismatch(f"kernel has {b.size} entries, grid {self.shape} needs {self.shape.N}")
        object.__setattr__(self, "b", b)

    @property
    def grid(self) -> np.ndarray:
        return self.b.reshape(self.shape.H, self.shape.W)

    @classmethod
    def from_grid(cls, grid) -> "BccbKernel":
        grid = np.asarray(grid, dtype=np.float64)
        return cls(grid.ravel(), GridShape(*grid.shape))


@dataclass(frozen=True)
class ProjectionResult:
    kernel: BccbKernel
    residual_fro: float
    similarity: float


def check_dense_size(n: int, allow_large: bool) -> None:
    if n > MAX_DENSE_N and not allow_large:
        raise TooLarge(f"dense N={n} exceeds {MAX_DENSE_N}; pass allow_large to override")


def bccb_class_index(shape: GridShape) -> np.ndarray:
    """N x N array mapping each matrix position to its first-row index."""
    H, W = shape.H, shape.W
    ix, iy = np.divmod(np.arange(shape.N, dtype=np.int32), W)
    dx = (ix[None, :] - ix[:, None]) % H
    dy = (iy[None, :] - iy[:, None]) % W
    return dx * W + dy


def bccb_materialize(kernel: BccbKernel, allow_large: bool = False) -> np.ndarray:
    check_dense_size(kernel.shape.N, allow_large)
    return kernel.b[bccb_class_index(kernel.shape)]


def bccb_basis(k: int, shape: GridShape) -> np.ndarray:
    """Dense ``B_k``: the BCCB matrix whose first row is one-hot at ``k``."""
    e = np.zeros(shape.N)
    e[k] = 1.0
    return bccb_materialize(BccbKernel(e, shape))


def circulant_matvec_naive(kernel: CirculantKernel, x) -> np.ndarray:
    """``(Cx)_i = sum_k c_k x[(i + k) % n]`` by direct summation."""
    x = np.asarray(x, dtype=np.float64)
    n = kernel.n
    if x.shape[0] != n:
        raise ShapeMismatch(f"kernel length {n} vs vector length {x.shape[0]}")
    out = np.zeros_like(x)
    for k in range(n):
        out += kernel.c[k] * np.roll(x, -k, axis=0)
    return out


def bccb_matvec_naive(kernel: BccbKernel, x) -> np.ndarray:
    """O(N^2) double sum ``y[i] = sum_k b[k] x[i + k]`` with 2D wraparound.

    ``x`` is flat, shaped ``(N,)`` or ``(N, c)``.
    """
    x = np.asarray(x, dtype=np.float64)
    H, W = kernel.shape.H, kernel.shape.W
    if x.shape[0] != kernel.shape.N:
        raise ShapeMismatch(f"vector has {x.shape[0]} rows, grid {kernel.shape} needs {kernel.shape.N}")
    xg = x.reshape((H, W) + x.shape[1:])
    out = np.zeros_like(xg)
    for k, bk in enumerate(kernel.b):
        if bk != 0.0:
            kx, ky = divmod(k, W)
            out += bk * np.roll(xg, (-kx, -ky), axis=(0, 1))
    return out.reshape(x.shape)


def project_to_bccb(A, shape: GridShape) -> ProjectionResult:
    """Orthogonal (Frobenius) projection of ``A`` onto the BCCB subspace.

    Each first-row entry is the mean of ``A`` over its offset class, computed in
    one O(N^2) pass. ``similarity`` is ``||A_proj||^2 / ||A||^2`` (1 for A = 0).
    """
    A = np.asarray(A, dtype=np.float64)
    N = shape.N
    if A.shape != (N, N):
        raise ShapeMismatch(f"matrix is {A.shape}, grid {shape} needs ({N}, {N})")
    cls = bccb_class_index(shape)
    b = np.bincount(cls.ravel(), weights=A.ravel(), minlength=N) / N
    residual = float(np.sqrt(np.sum((A - b[cls]) ** 2)))
    total = float(np.sum(A * A))
    proj = N * float(b @ b)
    similarity = 1.0 if total == 0.0 else min(1.0, proj / total)
    return ProjectionResult(BccbKernel(b, shape), residual, similarity)


def nearest_bccb_distance_check(A, shape: GridShape, trials: int, seed: int = 0) -> bool:
    """True iff no sampled BCCB matrix lies closer to ``A`` than its projection.

    Half the trials draw unrelated random kernels, half perturb the projection
    itself so the comparison probes its immediate neighbourhood.
    """
    A = np.asarray(A, dtype=np.float64)
    if trials <= 0:
        return True
    proj = project_to_bccb(A, shape)
    cls = bccb_class_index(shape)
    best = float(np.linalg.norm(A - proj.kernel.b[cls]))
    rng = np.random.default_rng(seed)
    scale = max(float(np.abs(A).max(initial=0.0)), 1.0)
    for t in range(trials):
        if t % 2:
            b = proj.kernel.b + 1e-3 * scale * rng.standard_normal(shape.N)
        else:
            b = scale * rng.standard_normal(shape.N)
        if best > float(np.linalg.norm(A - b[cls])) + 1e-9:
            return False
    return True
