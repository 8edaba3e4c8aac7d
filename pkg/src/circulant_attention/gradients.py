"""Hand-derived reverse-mode gradients for one circulant attention head.

Forward, for ``(H, W, d)`` inputs and ``N = H*W``::

    S  = Q (*) K                      # channel-wise circular correlation
    a  = sum_c S[..., c] / (N sqrt(d))
    p  = softmax(a)
    Y  = p (*) Vin                    # Vin = V * T under pre-reweighting
    O  = Y * T under post-reweighting, else Y

Adjoints used below: for fixed ``b``, ``x -> b (*) x`` transposes to circular
convolution with ``b``; for fixed ``x``, ``b -> b (*) x`` transposes to
``y -> y (*) x``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .attention import Reweighting, _reweight_inputs, _same, _tokens, circulant_scores, softmax_first_row
from .spectral import circconv2d, circorr2d


@dataclass(frozen=True)
class HeadGradients:
    dQ: np.ndarray
    dK: np.ndarray
    dV: np.ndarray
    dT: Optional[np.ndarray] = None


def softmax_jacobian(p) -> np.ndarray:
    p = np.asarray(p, dtype=np.float64)
    return np.diag(p) - np.outer(p, p)


def circulant_attention_backward(Q, K, V, T, mode, upstream) -> HeadGradients:
    """Gradients of ``<upstream, circulant_attention(Q, K, V, mode, T)>``."""
    Q, K, V = _tokens(Q, "Q"), _tokens(K, "K"), _tokens(V, "V")
    G = _tokens(upstream, "upstream")
    _same(("Q", Q), ("K", K), ("V", V), ("upstream", G))
    mode, T = _reweight_inputs(V, mode, T)
    H, W, d = Q.shape
    p = softmax_first_row(circulant_scores(Q, K)).grid
    v_in = V * T if mode is Reweighting.PRE else V

    dT = None
    if mode is Reweighting.POST:
        dT = G * circorr2d(p, v_in)
        dY = G * T
    else:
        dY = G

    dv_in = circconv2d(p, dY)
    dp = circorr2d(dY, v_in).sum(axis=-1)
    da = p * (dp - np.sum(p * dp))
    dS = np.repeat((da / (H * W * math.sqrt(d)))[:, :, None], d, axis=2)
    dQ = circorr2d(dS, K)
    dK = circconv2d(dS, Q)

    if mode is Reweighting.PRE:
        dT = dv_in * V
        dV = dv_in * T
    else:
        dV = dv_in
    return HeadGradients(dQ, dK, dV, dT)


def finite_difference_gradient(f: Callable[[np.ndarray], float], x, eps: float = 1e-5) -> np.ndarray:
    """Central differences ``(f(x + eps e_i) - f(x - eps e_i)) / (2 eps)`` per coordinate."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    x = np.array(x, dtype=np.float64)
    grad = np.empty_like(x)
    flat, gflat = x.reshape(-1), grad.reshape(-1)
    for i in range(flat.size):
        orig = flat[i]
        flat[i] = orig + eps
        hi = f(x)
        flat[i] = orig - eps
        lo = f(x)
        flat[i] = orig
        gflat[i] = (hi - lo) / (2.0 * eps)
    return grad


def gradient_rel_error(analytic, numeric) -> float:
    """``||analytic - numeric||_inf / max(||analytic||_inf, 1e-8)``."""
    analytic = np.asarray(analytic)
    err = float(np.abs(analytic - np.asarray(numeric)).max(initial=0.0))
    return err / max(float(np.abs(analytic).max(initial=0.0)), 1e-8)


def check_head_gradients(Q, K, V, T, mode, upstream, eps: float = 1e-5) -> dict[str, float]:
    """Relative error of every analytic gradient against finite differences."""
    from .attention import circulant_attention

    mode = Reweighting(mode)
    grads = circulant_attention_backward(Q, K, V, T, mode, upstream)
    args = {"Q": Q, "K": K, "V": V, "T": T}
    analytic = {"Q": grads.dQ, "K": grads.dK, "V": grads.dV, "T": grads.dT}
    names = ["Q", "K", "V"] + (["T"] if mode is not Reweighting.NONE else [])
    errors = {}
    for name in names:
        def loss(z, name=name):
            kw = dict(args, **{name: z})
            return float(np.sum(upstream * circulant_attention(kw["Q"], kw["K"], kw["V"], mode, kw["T"])))

        errors[name] = gradient_rel_error(analytic[name], finite_difference_gradient(loss, args[name], eps))
    return errors
