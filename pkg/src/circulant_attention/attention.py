"""Reference self-attention and circulant (BCCB) attention.

Token tensors are ``(H, W, d)`` float arrays: the grid shape travels with the
data. Flattening in C order gives the ``N x d`` token-major layout.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import MissingReweight, ShapeMismatch
from .rng import SplitMix64
from .spectral import GridShape, circorr2d
from .structured import BccbKernel, check_dense_size, bccb_materialize, project_to_bccb


class Reweighting(str, enum.Enum):
    NONE = "none"
    PRE = "pre"
    POST = "post"


@dataclass(frozen=True)
class AttentionConfig:
    shape: GridShape
    heads: int
    head_dim: int
    model_dim: int
    reweighting: Reweighting = Reweighting.POST
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "reweighting", Reweighting(self.reweighting))
        if min(self.heads, self.head_dim, self.model_dim) < 1:
            raise ShapeMismatch("heads, head_dim and model_dim must be positive")
        if self.model_dim != self.heads * self.head_dim:
            raise ShapeMismatch(
                f"model_dim {self.model_dim} != heads {self.heads} * head_dim {self.head_dim}"
            )


@dataclass(frozen=True)
class ProjectionWeights:
    """Per-head ``C x d`` projections stacked as ``(heads, C, d)``, plus ``Wo``."""

    wq: np.ndarray
    wk: np.ndarray
    wv: np.ndarray
    wt: np.ndarray
    wo: np.ndarray

    @classmethod
    def init(cls, config: AttentionConfig) -> "ProjectionWeights":
        """Uniform weights in [-1/sqrt(C), 1/sqrt(C)] drawn from SplitMix64(seed)."""
        C, h, d = config.model_dim, config.heads, config.head_dim
        bound = 1.0 / math.sqrt(C)
        rng = SplitMix64(config.seed)
        draw = lambda shape: rng.uniform(shape, -bound, bound)  # noqa: E731
        return cls(draw((h, C, d)), draw((h, C, d)), draw((h, C, d)), draw((h, C, d)), draw((C, C)))

    def check(self, config: AttentionConfig) -> None:
        C, h, d = config.model_dim, config.heads, config.head_dim
        for name in ("wq", "wk", "wv", "wt"):
            if getattr(self, name).shape != (h, C, d):
                raise ShapeMismatch(f"{name} is {getattr(self, name).shape}, expected {(h, C, d)}")
        if self.wo.shape != (C, C):
            raise ShapeMismatch(f"wo is {self.wo.shape}, expected {(C, C)}")


def _tokens(x, name: str) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 3:
        raise ShapeMismatch(f"{name} must be (H, W, d), got {x.shape}")
    return x


def _same(*named) -> None:
    shapes = {name: a.shape for name, a in named}
    if len(set(shapes.values())) != 1:
        raise ShapeMismatch(f"shapes disagree: {shapes}")


def softmax_rows(A: np.ndarray) -> np.ndarray:
    z = np.exp(A - A.max(axis=-1, keepdims=True))
    return z / z.sum(axis=-1, keepdims=True)


def self_attention_reference(Q, K, V) -> np.ndarray:
    """Dense ``softmax(Q K^T / sqrt(d)) V``, O(N^2 d)."""
    Q, K, V = _tokens(Q, "Q"), _tokens(K, "K"), _tokens(V, "V")
    _same(("Q", Q), ("K", K), ("V", V))
    H, W, d = Q.shape
    q, k, v = (a.reshape(H * W, d) for a in (Q, K, V))
    P = softmax_rows(q @ k.T / math.sqrt(d))
    return (P @ v).reshape(H, W, d)


def circulant_scores(Q, K) -> BccbKernel:
    """First row of the projected score matrix via FFT, O(N log N d)."""
    Q, K = _tokens(Q, "Q"), _tokens(K, "K")
    _same(("Q", Q), ("K", K))
    H, W, d = Q.shape
    a = circorr2d(Q, K).sum(axis=-1) / (H * W * math.sqrt(d))
    return BccbKernel(a.ravel(), GridShape(H, W))


def circulant_scores_naive(Q, K, allow_large: bool = False) -> BccbKernel:
    """Same kernel as :func:`circulant_scores`, by projecting the dense scores."""
    Q, K = _tokens(Q, "Q"), _tokens(K, "K")
    _same(("Q", Q), ("K", K))
    H, W, d = Q.shape
    shape = GridShape(H, W)
    check_dense_size(shape.N, allow_large)
    q, k = Q.reshape(-1, d), K.reshape(-1, d)
    return project_to_bccb(q @ k.T / math.sqrt(d), shape).kernel


def softmax_first_row(kernel: BccbKernel) -> BccbKernel:
    """Softmax of the first row; for a BCCB matrix this is its row-wise softmax."""
    return BccbKernel(softmax_rows(kernel.b), kernel.shape)


def _reweight_inputs(V: np.ndarray, mode, T):
    mode = Reweighting(mode)
    if mode is Reweighting.NONE:
        return mode, None
    if T is None:
        raise MissingReweight(f"mode {mode.value!r} needs a reweighting tensor T")
    T = _tokens(T, "T")
    _same(("V", V), ("T", T))
    return mode, T


def circulant_attention(Q, K, V, mode="none", T=None) -> np.ndarray:
    """``softmax(a) (*) V`` with optional pre/post token reweighting by ``T``."""
    Q, K, V = _tokens(Q, "Q"), _tokens(K, "K"), _tokens(V, "V")
    _same(("Q", Q), ("K", K), ("V", V))
    mode, T = _reweight_inputs(V, mode, T)
    p = softmax_first_row(circulant_scores(Q, K)).grid
    out = circorr2d(p, V * T if mode is Reweighting.PRE else V)
    return out * T if mode is Reweighting.POST else out


def circulant_attention_naive(Q, K, V, mode="none", T=None, allow_large: bool = False) -> np.ndarray:
    """Dense oracle: ``softmax(A_proj) V`` with ``A_proj`` materialized."""
    Q, K, V = _tokens(Q, "Q"), _tokens(K, "K"), _tokens(V, "V")
    _same(("Q", Q), ("K", K), ("V", V))
    mode, T = _reweight_inputs(V, mode, T)
    H, W, d = V.shape
    kernel = circulant_scores_naive(Q, K, allow_large=allow_large)
    P = softmax_rows(bccb_materialize(kernel, allow_large=allow_large))
    v = (V * T if mode is Reweighting.PRE else V).reshape(-1, d)
    out = (P @ v).reshape(H, W, d)
    return out * T if mode is Reweighting.POST else out


def silu(z):
    return z / (1.0 + np.exp(-z))


def compute_reweighting(x, wt) -> np.ndarray:
    """``T = SiLU(x Wt)`` for ``x`` of shape (H, W, C) and ``Wt`` of shape (C, d)."""
    x = _tokens(x, "x")
    wt = np.asarray(wt, dtype=np.float64)
    if wt.ndim != 2 or wt.shape[0] != x.shape[-1]:
        raise ShapeMismatch(f"Wt is {wt.shape}, x has {x.shape[-1]} channels")
    return silu(x @ wt)


def multihead_circulant_attention(x, weights: ProjectionWeights, config: AttentionConfig,
                                  naive: bool = False) -> np.ndarray:
    """Per-head circulant attention, heads concatenated along channels, then ``Wo``.

    ``naive=True`` swaps in the dense projection oracle for every head.
    """
    x = _tokens(x, "x")
    if x.shape != (config.shape.H, config.shape.W, config.model_dim):
        raise ShapeMismatch(
            f"x is {x.shape}, config expects {(config.shape.H, config.shape.W, config.model_dim)}"
        )
    weights.check(config)
    attend = circulant_attention_naive if naive else circulant_attention
    mode, d = config.reweighting, config.head_dim
    heads = np.empty(x.shape[:2] + (config.model_dim,))
    for h in range(config.heads):
        T = compute_reweighting(x, weights.wt[h]) if mode is not Reweighting.NONE else None
        heads[..., h * d:(h + 1) * d] = attend(
            x @ weights.wq[h], x @ weights.wk[h], x @ weights.wv[h], mode, T
        )
    return heads @ weights.wo
