import threading

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from circulant_attention.errors import FormatError, ShapeMismatch
from circulant_attention.spectral import (GridShape, circconv2d, circorr2d, dft1d_forward,
                                          dft1d_inverse, dft2d_forward, dft2d_inverse)
from circulant_attention.structured import BccbKernel, bccb_materialize

from oracles import direct_corr2d, naive_dft, naive_dft2, naive_idft

finite = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)


def complex_vectors(min_size=1, max_size=64):
    return st.integers(min_size, max_size).flatmap(
        lambda n: st.tuples(hnp.arrays(float, n, elements=finite), hnp.arrays(float, n, elements=finite))
    ).map(lambda p: p[0] + 1j * p[1])


def rel(a, b):
    return np.abs(a - b).max() / max(np.abs(b).max(), 1e-300)


class TestDft1d:
    def test_impulse(self):
        np.testing.assert_allclose(dft1d_forward([1, 0, 0, 0]), [1, 1, 1, 1], atol=0)

    def test_constant(self):
        np.testing.assert_allclose(dft1d_forward([1, 1, 1, 1]), [4, 0, 0, 0], atol=1e-15)

    def test_inverse_of_constant_spectrum(self):
        np.testing.assert_allclose(dft1d_inverse([4, 0, 0, 0]), [1, 1, 1, 1], atol=1e-15)

    def test_length7_matches_naive(self, rng):
        x = rng.standard_normal(7) + 1j * rng.standard_normal(7)
        assert rel(dft1d_forward(x), naive_dft(x)) <= 1e-12

    def test_length14_inverse_matches_naive(self, rng):
        X = rng.standard_normal(14) + 1j * rng.standard_normal(14)
        assert rel(dft1d_inverse(X), naive_idft(X)) <= 1e-12

    def test_roundtrip_12(self, rng):
        x = rng.standard_normal(12)
        assert rel(dft1d_inverse(dft1d_forward(x)), x) <= 1e-12

    @pytest.mark.parametrize("n", [1, 2, 3, 5, 16, 17, 31, 56, 64, 97])
    def test_against_naive(self, rng, n):
        x = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        assert rel(dft1d_forward(x), naive_dft(x)) <= 1e-12

    @pytest.mark.parametrize("p", range(11))
    def test_radix2_and_bluestein_agree(self, rng, p):
        x = rng.standard_normal(2**p) + 1j * rng.standard_normal(2**p)
        assert rel(dft1d_forward(x, "bluestein"), dft1d_forward(x, "radix2")) <= 1e-11

    def test_radix2_rejects_other_lengths(self):
        with pytest.raises(ShapeMismatch):
            dft1d_forward(np.ones(6), "radix2")

    def test_large_bluestein_length(self, rng):
        x = rng.standard_normal(3136)
        X = dft1d_forward(x)
        assert rel(dft1d_inverse(X), x) <= 1e-11
        # spot-check a few bins against the defining sum
        k = np.array([0, 1, 777, 3135])
        j = np.arange(3136)
        ref = np.exp(-2j * np.pi * ((np.outer(k, j)) % 3136) / 3136) @ x
        assert rel(X[k], ref) <= 1e-11

    def test_batched_last_axis(self, rng):
        x = rng.standard_normal((3, 10))
        X = dft1d_forward(x)
        for row, ref in zip(X, x):
            assert rel(row, naive_dft(ref)) <= 1e-12

    def test_nonfinite_propagates(self):
        X = dft1d_forward([1.0, np.nan, 0.0])
        assert np.isnan(X).all()

    def test_thread_safety(self, rng):
        xs = [rng.standard_normal(n) for n in (7, 13, 56, 64, 100, 7, 13)]
        expected = [dft1d_forward(x) for x in xs]
        got = [None] * len(xs)

        def work(i):
            for _ in range(20):
                got[i] = dft1d_forward(xs[i])

        threads = [threading.Thread(target=work, args=(i,)) for i in range(len(xs))]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        for g, e in zip(got, expected):
            assert np.array_equal(g, e)


@given(complex_vectors())
def test_roundtrip_property(x):
    err = np.abs(dft1d_inverse(dft1d_forward(x)) - x).max()
    assert err <= 1e-11 * max(np.abs(x).max(), 1e-300) or np.abs(x).max() == 0


@given(complex_vectors())
def test_parseval_property(x):
    energy = np.vdot(x, x).real
    X = dft1d_forward(x)
    assert abs(np.vdot(X, X).real - len(x) * energy) <= 1e-11 * len(x) * energy + 1e-300


@given(complex_vectors(), st.complex_numbers(max_magnitude=10), st.complex_numbers(max_magnitude=10))
def test_linearity_property(x, alpha, beta):
    y = np.roll(x, 1)[::-1]
    lhs = dft1d_forward(alpha * x + beta * y)
    rhs = alpha * dft1d_forward(x) + beta * dft1d_forward(y)
    scale = (abs(alpha) + abs(beta)) * np.abs(dft1d_forward(np.abs(x))).max()
    assert np.abs(lhs - rhs).max() <= 1e-11 * scale + 1e-300


class TestDft2d:
    def test_impulse(self):
        x = np.zeros((3, 4))
        x[0, 0] = 1
        np.testing.assert_allclose(dft2d_forward(x), np.ones((3, 4)), atol=1e-15)

    def test_2x2_matches_naive(self, rng):
        x = rng.standard_normal((2, 2))
        assert rel(dft2d_forward(x), naive_dft2(x)) <= 1e-12

    def test_5x6_matches_naive(self, rng):
        x = rng.standard_normal((5, 6)) + 1j * rng.standard_normal((5, 6))
        assert rel(dft2d_forward(x), naive_dft2(x)) <= 1e-12

    def test_roundtrip_14(self, rng):
        x = rng.standard_normal((14, 14))
        assert rel(dft2d_inverse(dft2d_forward(x)), x) <= 1e-12

    def test_channels_independent(self, rng):
        x = rng.standard_normal((4, 3, 2))
        X = dft2d_forward(x)
        for c in range(2):
            assert rel(X[..., c], naive_dft2(x[..., c])) <= 1e-12


@given(st.integers(1, 64), st.integers(1, 64), st.integers(0, 2**32 - 1))
def test_roundtrip_2d_property(H, W, seed):
    x = np.random.default_rng(seed).standard_normal((H, W))
    assert rel(dft2d_inverse(dft2d_forward(x)), x) <= 1e-11


class TestCircorr:
    def test_identity_kernel(self, rng):
        x = rng.standard_normal((3, 5, 2))
        b = np.zeros((3, 5, 2))
        b[0, 0] = 1
        np.testing.assert_allclose(circorr2d(b, x), x, atol=1e-14)

    @pytest.mark.parametrize("k", [1, 4, 7, 14])
    def test_shift_kernel(self, rng, k):
        H, W = 3, 5
        x = rng.standard_normal((H, W, 1))
        b = np.zeros((H, W, 1))
        b.reshape(-1)[k] = 1
        dh, dw = divmod(k, W)
        np.testing.assert_allclose(circorr2d(b, x), np.roll(x, (-dh, -dw), axis=(0, 1)), atol=1e-14)

    def test_matches_dense_bccb(self, rng):
        H, W = 3, 5
        b, x = rng.standard_normal((H, W, 2)), rng.standard_normal((H, W, 2))
        out = circorr2d(b, x)
        for c in range(2):
            dense = bccb_materialize(BccbKernel(b[..., c].ravel(), GridShape(H, W)))
            np.testing.assert_allclose(out[..., c].ravel(), dense @ x[..., c].ravel(), atol=1e-10)

    def test_random_cases_match_direct_sum(self, rng):
        for _ in range(10):
            H, W, c = rng.integers(1, 9), rng.integers(1, 9), rng.integers(1, 3)
            b, x = rng.standard_normal((H, W, c)), rng.standard_normal((H, W, c))
            np.testing.assert_allclose(circorr2d(b, x), direct_corr2d(b, x), atol=1e-10)

    def test_single_channel_kernel_broadcasts(self, rng):
        b, x = rng.standard_normal((4, 4)), rng.standard_normal((4, 4, 3))
        out = circorr2d(b, x)
        for c in range(3):
            np.testing.assert_allclose(out[..., c], circorr2d(b, x[..., c]), atol=1e-14)

    def test_shape_mismatch(self):
        with pytest.raises(ShapeMismatch):
            circorr2d(np.ones((3, 4, 1)), np.ones((4, 3, 1)))
        with pytest.raises(ShapeMismatch):
            circorr2d(np.ones((3, 4, 2)), np.ones((3, 4, 3)))

    def test_conv_is_adjoint(self, rng):
        b, x, y = (rng.standard_normal((5, 7, 2)) for _ in range(3))
        lhs = np.sum(circorr2d(b, x) * y)
        rhs = np.sum(x * circconv2d(b, y))
        assert abs(lhs - rhs) <= 1e-10 * abs(lhs)


class TestGridShape:
    def test_parse(self):
        g = GridShape.parse("14x28")
        assert (g.H, g.W, g.N) == (14, 28, 392)
        assert str(g) == "14x28"

    @pytest.mark.parametrize("bad", ["196", "14X14", "0x3x", "a x b", "14x"])
    def test_parse_rejects(self, bad):
        with pytest.raises(FormatError):
            GridShape.parse(bad)

    def test_rejects_zero(self):
        with pytest.raises(ShapeMismatch):
            GridShape(0, 3)
