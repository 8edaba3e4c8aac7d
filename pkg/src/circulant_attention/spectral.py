"""Discrete Fourier transforms and the DFT-based circular correlation.

Transforms follow the unnormalized-forward convention::

    X[k] = sum_j x[j] exp(-2 pi i j k / n)
    x[j] = (1/n) sum_k X[k] exp(+2 pi i j k / n)

Power-of-two lengths use an iterative radix-2 Cooley-Tukey butterfly; every
other length goes through Bluestein's chirp-z reduction to a power-of-two
circular convolution, so all lengths cost O(n log n).

Grid-shaped data is stored as ``(H, W)`` or ``(H, W, c)`` arrays. Flat token
index ``k`` maps to grid coordinates ``(k // W, k % W)``, i.e. plain C-order
reshaping.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import FormatError, ImaginaryResidueError, ShapeMismatch

__all__ = [
    "GridShape",
    "dft1d_forward",
    "dft1d_inverse",
    "dft2d_forward",
    "dft2d_inverse",
    "circorr2d",
    "circconv2d",
    "is_power_of_two",
]

# Twiddle recurrences are re-anchored to a directly evaluated root this often.
REANCHOR_EVERY = 32
# Relative bound on imaginary residue left by an inverse transform.
IMAG_RESIDUE_TOL = 1e-9


@dataclass(frozen=True)
class GridShape:
    H: int
    W: int

    def __post_init__(self):
        if int(self.H) != self.H or int(self.W) != self.W or self.H < 1 or self.W < 1:
            raise ShapeMismatch(f"grid dims must be positive ints, got {self.H}x{self.W}")

    @property
    def N(self) -> int:
        return self.H * self.W

    @classmethod
    def parse(cls, text: str) -> "GridShape":
        """Parse the ``HxW`` flag syntax, e.g. ``"14x14"``."""
        m = re.fullmatch(r"\s*(\d+)x(\d+)\s*", text)
        if m is None:
            raise FormatError(f"grid must look like HxW (e.g. 14x14), got {text!r}")
        return cls(int(m.group(1)), int(m.group(2)))

    def __str__(self) -> str:
        return f"{self.H}x{self.W}"


def is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@lru_cache(maxsize=None)
def _stage_twiddles(size: int) -> np.ndarray:
    """exp(-2 pi i j / size) for j < size // 2.

    Built by repeated multiplication with one root, restarting from a directly
    evaluated anchor every REANCHOR_EVERY steps to bound phase drift.
    """
    half = size // 2
    theta = -2.0 * math.pi / size
    root = complex(math.cos(theta), math.sin(theta))
    steps = np.empty(min(half, REANCHOR_EVERY), dtype=np.complex128)
    w = 1.0 + 0.0j
    for j in range(steps.size):
        steps[j] = w
        w *= root
    n_anchor = -(-half // REANCHOR_EVERY)
    anchor_angle = theta * REANCHOR_EVERY * np.arange(n_anchor)
    anchors = np.cos(anchor_angle) + 1j * np.sin(anchor_angle)
    tw = (anchors[:, None] * steps[None, :]).ravel()[:half]
    return _readonly(tw)


@lru_cache(maxsize=None)
def _bit_reversal(n: int) -> np.ndarray:
    bits = n.bit_length() - 1
    idx = np.arange(n)
    rev = np.zeros(n, dtype=np.intp)
    for _ in range(bits):
        rev = (rev << 1) | (idx & 1)
        idx >>= 1
    return _readonly(rev)


def _radix2(x: np.ndarray, inverse: bool = False) -> np.ndarray:
    """Unnormalized DFT along axis 0 of a bit-reversed ``(n, batch)`` array.

    The caller supplies rows already in bit-reversed order so the gather can
    double as the copy that makes the data contiguous. The batch axis is
    innermost, keeping every butterfly stage a few large vector operations.
    ``inverse`` flips the twiddle sign (no 1/n factor).
    """
    n, batch = x.shape
    x = np.ascontiguousarray(x)
    buf = np.empty_like(x)
    m = 1
    while m < n:
        tw = _stage_twiddles(2 * m)
        if inverse:
            tw = np.conj(tw)
        y = x.reshape(n // (2 * m), 2, m, batch)
        o = buf.reshape(n // (2 * m), 2, m, batch)
        odd = y[:, 1] * tw[:, None]
        np.add(y[:, 0], odd, out=o[:, 0])
        np.subtract(y[:, 0], odd, out=o[:, 1])
        x, buf = buf, x
        m *= 2
    return x


@lru_cache(maxsize=None)
def _bluestein_plan(n: int, inverse: bool) -> tuple[np.ndarray, np.ndarray, int]:
    m = 1
    while m < 2 * n - 1:
        m *= 2
    k = np.arange(n, dtype=np.int64)
    # k^2 mod 2n keeps the chirp phase exact for large k.
    phase = np.pi * ((k * k) % (2 * n)) / n
    chirp = np.cos(phase) + (1j if inverse else -1j) * np.sin(phase)
    filt = np.zeros(m, dtype=np.complex128)
    filt[:n] = np.conj(chirp)
    if n > 1:
        filt[m - n + 1:] = np.conj(chirp[1:])[::-1]
    filt_hat = _radix2(filt[_bit_reversal(m), None])
    return _readonly(chirp[:, None]), _readonly(filt_hat), m


def _bluestein(x: np.ndarray, inverse: bool = False) -> np.ndarray:
    """Unnormalized DFT along axis 0 of an ``(n, batch)`` array, any n."""
    n, batch = x.shape
    chirp, filt_hat, m = _bluestein_plan(n, inverse)
    rev = _bit_reversal(m)
    padded = np.zeros((m, batch), dtype=np.complex128)
    padded[:n] = x * chirp
    prod = _radix2(padded[rev]) * filt_hat
    conv = _radix2(prod[rev], inverse=True)
    conv = conv[:n]
    conv *= chirp / m
    return conv


_ALGORITHMS = ("auto", "radix2", "bluestein")


def _transform(x, axis: int, algorithm: str, inverse: bool) -> np.ndarray:
    if algorithm not in _ALGORITHMS:
        raise ValueError(f"algorithm must be one of {_ALGORITHMS}, got {algorithm!r}")
    x = np.asarray(x, dtype=np.complex128)
    n = x.shape[axis]
    if n < 1:
        raise ShapeMismatch("transform length must be >= 1")
    use_bluestein = algorithm == "bluestein" or (algorithm == "auto" and not is_power_of_two(n))
    if not use_bluestein and not is_power_of_two(n):
        raise ShapeMismatch(f"radix-2 path needs a power-of-two length, got {n}")
    front = np.moveaxis(x, axis, 0)
    if use_bluestein:
        out = _bluestein(front.reshape(n, -1), inverse)
    else:
        out = _radix2(front[_bit_reversal(n)].reshape(n, -1), inverse)
    if inverse:
        out /= n
    return np.moveaxis(out.reshape(front.shape), 0, axis)


def _forward(x, axis: int, algorithm: str) -> np.ndarray:
    return _transform(x, axis, algorithm, inverse=False)


def _inverse(X, axis: int, algorithm: str) -> np.ndarray:
    return _transform(X, axis, algorithm, inverse=True)


def dft1d_forward(x, algorithm: str = "auto") -> np.ndarray:
    """Unnormalized forward DFT along the last axis.

    ``algorithm`` may force ``"radix2"`` (power-of-two lengths only) or
    ``"bluestein"``; ``"auto"`` picks radix-2 whenever it applies.
    """
    return _forward(x, -1, algorithm)


def dft1d_inverse(X, algorithm: str = "auto") -> np.ndarray:
    """Inverse DFT along the last axis, including the 1/n factor."""
    return _inverse(X, -1, algorithm)


def dft2d_forward(x, axes: tuple[int, int] = (0, 1), algorithm: str = "auto") -> np.ndarray:
    """Separable 2D DFT over ``axes`` (rows first, then columns).

    Extra axes, such as a trailing channel axis, are transformed independently.
    """
    return _forward(_forward(x, axes[1], algorithm), axes[0], algorithm)


def dft2d_inverse(X, axes: tuple[int, int] = (0, 1), algorithm: str = "auto") -> np.ndarray:
    return _inverse(_inverse(X, axes[1], algorithm), axes[0], algorithm)


def _check_pair(b: np.ndarray, x: np.ndarray) -> None:
    if b.ndim not in (2, 3) or x.ndim not in (2, 3):
        raise ShapeMismatch(f"expected (H, W) or (H, W, c) arrays, got {b.shape} and {x.shape}")
    if b.shape[:2] != x.shape[:2]:
        raise ShapeMismatch(f"grid dims disagree: {b.shape[:2]} vs {x.shape[:2]}")
    if b.ndim == 3 and x.ndim == 3 and b.shape[2] not in (1, x.shape[2]):
        raise ShapeMismatch(f"channel dims disagree: {b.shape[2]} vs {x.shape[2]}")


def _real_part(z: np.ndarray, b: np.ndarray, x: np.ndarray) -> np.ndarray:
    # |out| <= ||b||_1 * ||x||_inf, so the residue bound scales with both.
    scale = float(np.abs(b).sum(axis=(0, 1)).max()) * float(np.abs(x).max(initial=0.0))
    if np.any(np.abs(z.imag) > IMAG_RESIDUE_TOL * scale):
        worst = float(np.nanmax(np.abs(z.imag)))
        raise ImaginaryResidueError(
            f"imaginary residue {worst:.3e} exceeds {IMAG_RESIDUE_TOL:g} * {scale:.3e}"
        )
    return np.ascontiguousarray(z.real)


def circorr2d(b, x) -> np.ndarray:
    """Channel-wise 2D circular cross-correlation ``b (*) x``.

    ``out[i] = sum_k b[k] x[(i + k) mod grid]``, evaluated as
    ``IDFT(conj(DFT(b)) * DFT(x))``. ``b`` and ``x`` are ``(H, W)`` or
    ``(H, W, c)``; a single-channel ``b`` broadcasts over the channels of ``x``.
    Equivalent to multiplying ``x`` by the BCCB matrix whose first row is ``b``.
    """
    b = np.asarray(b, dtype=np.float64)
    x = np.asarray(x, dtype=np.float64)
    _check_pair(b, x)
    bb = b if b.ndim == x.ndim else (b[:, :, None] if b.ndim == 2 else b[:, :, 0])
    z = dft2d_inverse(np.conj(dft2d_forward(bb)) * dft2d_forward(x))
    return _real_part(z, bb, x)


def circconv2d(b, y) -> np.ndarray:
    """Channel-wise 2D circular convolution, ``IDFT(DFT(b) * DFT(y))``.

    ``out[j] = sum_k b[k] y[(j - k) mod grid]``. For fixed ``b`` this is the
    adjoint of ``x -> circorr2d(b, x)``.
    """
    b = np.asarray(b, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    _check_pair(b, y)
    bb = b if b.ndim == y.ndim else (b[:, :, None] if b.ndim == 2 else b[:, :, 0])
    z = dft2d_inverse(dft2d_forward(bb) * dft2d_forward(y))
    return _real_part(z, bb, y)
