"""Analytic FLOP counts for circulant vs. self-attention, per layer and per model.

Counts follow the multiply-accumulate convention where one length-N DFT costs
``N log2 N``. Model totals cover the transformer blocks only; patch embedding
and the classifier head are left out.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError


@dataclass(frozen=True)
class FlopReport:
    N: int
    d: int
    heads: int
    flops_ca: float
    flops_sa: float
    ratio: float


def circulant_attention_flops(N: int, d: int) -> float:
    # scores: DFT Q,K + product + IDFT;  output: DFT a,V + product + IDFT
    return N * math.log2(N) * (4 * d + 2) + 4 * N * d


def self_attention_flops(N: int, d: int) -> float:
    return 2.0 * N * N * d


def attention_flops(N: int, d: int, heads: int = 1) -> FlopReport:
    if min(N, d, heads) < 1:
        raise DomainError(f"N, d, heads must be >= 1, got {N}, {d}, {heads}")
    ca = heads * circulant_attention_flops(N, d)
    sa = heads * self_attention_flops(N, d)
    return FlopReport(N, d, heads, ca, sa, sa / ca)


@dataclass(frozen=True)
class BlockModelSpec:
    blocks: int
    model_dim: int
    heads: int
    head_dim: int
    mlp_ratio: float = 4.0
    attention_kind: str = "self"
    reweighting: bool = False

    def __post_init__(self):
        if self.attention_kind not in ("self", "circulant"):
            raise DomainError(f"attention_kind must be 'self' or 'circulant', got {self.attention_kind!r}")
        if self.blocks < 0 or min(self.model_dim, self.heads, self.head_dim) < 1 or self.mlp_ratio < 0:
            raise DomainError(f"invalid block spec {self}")
        if self.model_dim != self.heads * self.head_dim:
            raise DomainError(f"model_dim {self.model_dim} != heads {self.heads} * head_dim {self.head_dim}")


def block_flops(spec: BlockModelSpec, N: int) -> float:
    C = spec.model_dim
    dense = (3 + 1 + 2 * spec.mlp_ratio) * N * C * C
    if spec.attention_kind == "self":
        attn = spec.heads * self_attention_flops(N, spec.head_dim)
    else:
        attn = spec.heads * circulant_attention_flops(N, spec.head_dim)
    extra = N * C * C + N * spec.head_dim * spec.heads if spec.reweighting else 0.0
    return dense + attn + extra


def model_flops(spec: BlockModelSpec, N: int) -> float:
    if N < 1:
        raise DomainError(f"N must be >= 1, got {N}")
    return spec.blocks * block_flops(spec, N)


def tokens_for_resolution(resolution: int, patch: int = 16) -> int:
    if resolution < 1 or patch < 1 or resolution % patch:
        raise DomainError(f"resolution {resolution} is not a positive multiple of patch {patch}")
    return (resolution // patch) ** 2


DEIT_T = BlockModelSpec(blocks=12, model_dim=192, heads=3, head_dim=64)
# "dim 192, head 192": one channel per head, post-reweighting on.
CA_DEIT_T = BlockModelSpec(blocks=12, model_dim=192, heads=192, head_dim=1,
                           attention_kind="circulant", reweighting=True)

MODELS = {"deit-t": DEIT_T, "ca-deit-t": CA_DEIT_T}
