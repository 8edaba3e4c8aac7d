"""Tools for studying how close attention maps are to BCCB structure."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .attention import circulant_scores, softmax_first_row
from .errors import DomainError
from .io import PathLike, write_pgm
from .spectral import GridShape
from .structured import project_to_bccb


@dataclass(frozen=True)
class SimilarityReport:
    similarity: float
    residual_fro: float
    kernel: np.ndarray  # (H, W)
    shape: GridShape

    def to_json(self) -> dict:
        return {
            "similarity": self.similarity,
            "residual_fro": self.residual_fro,
            "grid": [self.shape.H, self.shape.W],
        }


def bccb_similarity_report(A, shape: GridShape) -> SimilarityReport:
    res = project_to_bccb(A, shape)
    return SimilarityReport(res.similarity, res.residual_fro, res.kernel.grid.copy(), shape)


def extract_equivalent_kernel(Q, K) -> np.ndarray:
    """The global convolution kernel the circulant attention applies, as (H, W)."""
    return softmax_first_row(circulant_scores(Q, K)).grid.copy()


def kernel_to_pixels(kernel) -> np.ndarray:
    """Min-max scale to 0..255 with half-up rounding; constant kernels give 128."""
    kernel = np.asarray(kernel, dtype=np.float64)
    if kernel.ndim != 2:
        raise DomainError(f"kernel must be a 2D grid, got shape {kernel.shape}")
    if not np.all(np.isfinite(kernel)):
        raise DomainError("kernel has non-finite entries")
    lo, hi = float(kernel.min()), float(kernel.max())
    if hi == lo:
        return np.full(kernel.shape, 128, dtype=np.int64)
    scaled = (kernel - lo) / (hi - lo) * 255.0
    return np.array([[math.floor(v + 0.5) for v in row] for row in scaled], dtype=np.int64)


def export_kernel_pgm(kernel, path: PathLike) -> None:
    write_pgm(path, kernel_to_pixels(kernel))
