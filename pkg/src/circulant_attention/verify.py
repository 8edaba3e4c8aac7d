"""Property suites run by ``circattn verify``.

Each check returns ``(name, passed, max_err)``. Inputs come from a seeded
numpy generator, so output is identical across runs with the same seed.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

from .attention import (circulant_attention, circulant_attention_naive, circulant_scores,
                        softmax_first_row, softmax_rows)
from .gradients import check_head_gradients, softmax_jacobian
from .spectral import (GridShape, circconv2d, circorr2d, dft1d_forward, dft1d_inverse,
                       dft2d_forward, dft2d_inverse)
from .structured import (BccbKernel, bccb_basis, bccb_materialize, bccb_matvec_naive,
                         nearest_bccb_distance_check, project_to_bccb)

Result = tuple[str, bool, float]
MODES = ("none", "pre", "post")


def _cplx(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def _rel(a, b) -> float:
    return float(np.abs(np.asarray(a) - b).max() / max(np.abs(b).max(), 1e-300))


def naive_dft(x) -> np.ndarray:
    x = np.asarray(x, dtype=np.complex128)
    n = x.size
    jk = np.outer(np.arange(n), np.arange(n)) % n
    return np.exp(-2j * np.pi * jk / n) @ x


def _grid(rng, max_side=8):
    return GridShape(int(rng.integers(1, max_side + 1)), int(rng.integers(1, max_side + 1)))


def fft_suite(rng, cases: int) -> list[Result]:
    out = []
    rt = par = 0.0
    for n in range(1, 65):
        x = _cplx(rng, n)
        X = dft1d_forward(x)
        rt = max(rt, _rel(dft1d_inverse(X), x))
        par = max(par, abs(np.vdot(X, X).real - n * np.vdot(x, x).real) / (n * np.vdot(x, x).real))
    out.append(("fft.roundtrip_1d", rt <= 1e-11, rt))
    out.append(("fft.parseval", par <= 1e-11, par))

    lengths = [2, 3, 5, 7, 11, 13, 17, 31, 61] + list(rng.integers(1, 65, size=cases))
    err = max(_rel(dft1d_forward(x), naive_dft(x)) for x in (_cplx(rng, int(n)) for n in lengths))
    out.append(("fft.naive_agreement", err <= 1e-12, err))

    err = 0.0
    for _ in range(cases):
        n = int(rng.integers(1, 65))
        x, y = _cplx(rng, n), _cplx(rng, n)
        al, be = complex(*rng.standard_normal(2)), complex(*rng.standard_normal(2))
        err = max(err, _rel(dft1d_forward(al * x + be * y), al * dft1d_forward(x) + be * dft1d_forward(y)))
    out.append(("fft.linearity", err <= 1e-11, err))

    err = 0.0
    for p in range(0, 11):
        x = _cplx(rng, 2**p)
        err = max(err, _rel(dft1d_forward(x, "bluestein"), dft1d_forward(x, "radix2")))
    out.append(("fft.radix2_vs_bluestein", err <= 1e-11, err))

    err = 0.0
    for _ in range(cases):
        g = _grid(rng, 64)
        x = _cplx(rng, g.H, g.W)
        err = max(err, _rel(dft2d_inverse(dft2d_forward(x)), x))
    out.append(("fft.roundtrip_2d", err <= 1e-11, err))
    return out


def _direct_corr(b, x) -> np.ndarray:
    H, W = b.shape[:2]
    out = np.zeros_like(x)
    for i in range(H):
        for j in range(W):
            for kx in range(H):
                for ky in range(W):
                    out[i, j] += b[kx, ky] * x[(i + kx) % H, (j + ky) % W]
    return out


def bccb_suite(rng, cases: int) -> list[Result]:
    out = []
    err = 0.0
    for _ in range(cases):
        g = _grid(rng)
        b, x = rng.standard_normal((g.H, g.W, 2)), rng.standard_normal((g.H, g.W, 2))
        err = max(err, float(np.abs(circorr2d(b, x) - _direct_corr(b, x)).max()))
    out.append(("bccb.correlation_theorem", err <= 1e-10, err))

    err = 0.0
    for _ in range(cases):
        g = _grid(rng)
        k = BccbKernel(rng.standard_normal(g.N), g)
        x = rng.standard_normal(g.N)
        err = max(err, float(np.abs(bccb_matvec_naive(k, x) - bccb_materialize(k) @ x).max()))
    out.append(("bccb.naive_matvec", err <= 1e-10, err))

    bad = 0.0
    for H in range(1, 5):
        for W in range(1, 5):
            g = GridShape(H, W)
            basis = [bccb_basis(k, g) for k in range(g.N)]
            gram = np.array([[np.sum(Bi * Bj) for Bj in basis] for Bi in basis])
            bad = max(bad, float(np.abs(gram - g.N * np.eye(g.N)).max()))
    out.append(("bccb.basis_orthogonality", bad == 0.0, bad))

    idem = pyth = 0.0
    optimal = True
    for c in range(cases):
        g = _grid(rng, 6)
        A = rng.standard_normal((g.N, g.N))
        res = project_to_bccb(A, g)
        again = project_to_bccb(bccb_materialize(res.kernel), g)
        idem = max(idem, float(np.abs(again.kernel.b - res.kernel.b).max()))
        full = float(np.sum(A * A))
        pyth = max(pyth, abs(full - g.N * float(res.kernel.b @ res.kernel.b) - res.residual_fro**2) / full)
        optimal &= nearest_bccb_distance_check(A, g, trials=100, seed=c)
    out.append(("bccb.idempotence", idem <= 1e-12, idem))
    out.append(("bccb.pythagoras", pyth <= 1e-9, pyth))
    out.append(("bccb.nearest_optimality", optimal, 0.0))
    return out


def _qkvt(rng, g: GridShape, d: int):
    return tuple(rng.standard_normal((g.H, g.W, d)) for _ in range(4))


def attention_suite(rng, cases: int) -> list[Result]:
    out = []
    err = 0.0
    for c in range(cases):
        g, d, mode = _grid(rng), int(rng.choice([1, 2, 8])), MODES[c % 3]
        Q, K, V, T = _qkvt(rng, g, d)
        err = max(err, float(np.abs(circulant_attention(Q, K, V, mode, T)
                                    - circulant_attention_naive(Q, K, V, mode, T)).max()))
    out.append(("attention.fast_vs_naive", err <= 1e-9, err))

    ds = shift = conv = 0.0
    for _ in range(cases):
        g, d = _grid(rng), int(rng.integers(1, 5))
        Q, K, V, _ = _qkvt(rng, g, d)
        P = bccb_materialize(softmax_first_row(circulant_scores(Q, K)))
        ds = max(ds, float(np.abs(P.sum(0) - 1).max()), float(np.abs(P.sum(1) - 1).max()))
        dh, dw = int(rng.integers(0, g.H)), int(rng.integers(0, g.W))
        roll = lambda a: np.roll(a, (dh, dw), axis=(0, 1))  # noqa: E731
        shift = max(shift, float(np.abs(circulant_attention(roll(Q), roll(K), roll(V))
                                        - roll(circulant_attention(Q, K, V))).max()))
        O = circulant_attention(Q, K, V)
        lo, hi = V.min(axis=(0, 1)), V.max(axis=(0, 1))
        conv = max(conv, float(np.maximum(lo - O, O - hi).max()))
    out.append(("attention.doubly_stochastic", ds <= 1e-12, ds))
    out.append(("attention.shift_equivariance", shift <= 1e-10, shift))
    out.append(("attention.convexity", conv <= 1e-12, max(conv, 0.0)))

    err = 0.0
    for d in (1, 3):
        Q, K, V, _ = _qkvt(rng, GridShape(1, 1), d)
        err = max(err, float(np.abs(circulant_attention(Q, K, V) - V).max()))
    out.append(("attention.degenerate_grid", err <= 1e-12, err))
    return out


def grad_suite(rng, cases: int) -> list[Result]:
    out = []
    err = 0.0
    for _ in range(cases):
        g = _grid(rng)
        b, x, y = (rng.standard_normal((g.H, g.W, 2)) for _ in range(3))
        bx = circorr2d(b, x)
        lhs, rhs = float(np.sum(bx * y)), float(np.sum(x * circconv2d(b, y)))
        err = max(err, abs(lhs - rhs) / max(float(np.linalg.norm(bx) * np.linalg.norm(y)), 1e-300))
    out.append(("grad.adjoint_identity", err <= 1e-10, err))

    err = 0.0
    for _ in range(cases):
        p = softmax_rows(rng.standard_normal(int(rng.integers(1, 65))))
        err = max(err, float(np.abs(softmax_jacobian(p).sum(axis=1)).max()))
    out.append(("grad.softmax_jacobian_rows", err <= 1e-12, err))

    err = 0.0
    grids = (GridShape(2, 2), GridShape(3, 4), GridShape(4, 4))
    for c in range(cases):
        g, d, mode = grids[c % 3], (1, 2, 4)[(c // 3) % 3], MODES[(c // 9) % 3]
        Q, K, V, T = _qkvt(rng, g, d)
        G = rng.standard_normal((g.H, g.W, d))
        err = max(err, max(check_head_gradients(Q, K, V, T, mode, G).values()))
    out.append(("grad.finite_difference", err <= 1e-6, err))
    return out


SUITES: dict[str, Callable] = {
    "fft": fft_suite,
    "bccb": bccb_suite,
    "attention": attention_suite,
    "grad": grad_suite,
}


def run_suites(names, seed: int, cases: int) -> list[Result]:
    results = []
    for name in names:
        results.extend(SUITES[name](np.random.default_rng([seed, list(SUITES).index(name)]), cases))
    return results


def format_result(r: Result) -> str:
    name, ok, err = r
    return f"{'PASS' if ok else 'FAIL'} {name} max_err={err:.3e}"
