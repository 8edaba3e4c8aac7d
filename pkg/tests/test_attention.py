import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from circulant_attention.attention import (AttentionConfig, ProjectionWeights, Reweighting,
                                           circulant_attention, circulant_attention_naive,
                                           circulant_scores, circulant_scores_naive, compute_reweighting,
                                           multihead_circulant_attention, self_attention_reference,
                                           softmax_first_row)
from circulant_attention.errors import MissingReweight, ShapeMismatch, TooLarge
from circulant_attention.spectral import GridShape
from circulant_attention.structured import BccbKernel, bccb_materialize

from oracles import dense_softmax_rows, offset_scores


def tokens(rng, H, W, d, n=3):
    return tuple(rng.standard_normal((H, W, d)) for _ in range(n))


class TestSelfAttentionReference:
    def test_zero_queries_average_values(self, rng):
        K, V = tokens(rng, 2, 3, 4, 2)
        out = self_attention_reference(np.zeros_like(K), K, V)
        np.testing.assert_allclose(out, np.broadcast_to(V.mean(axis=(0, 1)), V.shape), atol=1e-14)

    def test_single_token(self, rng):
        Q, K, V = tokens(rng, 1, 1, 5)
        np.testing.assert_allclose(self_attention_reference(Q, K, V), V, atol=0)

    def test_convex_weights(self, rng):
        Q, K, V = tokens(rng, 2, 3, 3)
        q, k, v = (a.reshape(6, 3) for a in (Q, K, V))
        P = dense_softmax_rows(q @ k.T / math.sqrt(3))
        np.testing.assert_allclose(P.sum(axis=1), 1, atol=1e-12)
        np.testing.assert_allclose(self_attention_reference(Q, K, V).reshape(6, 3), P @ v, atol=1e-12)

    def test_shape_mismatch(self, rng):
        with pytest.raises(ShapeMismatch):
            self_attention_reference(np.ones((2, 2, 3)), np.ones((2, 2, 3)), np.ones((2, 2, 2)))


class TestScores:
    def test_zero(self, rng):
        Q, K = tokens(rng, 3, 3, 2, 2)
        assert np.all(circulant_scores(np.zeros_like(Q), K).b == 0)
        assert np.all(circulant_scores(Q, np.zeros_like(K)).b == 0)
        assert np.all(circulant_scores_naive(np.zeros_like(Q), np.zeros_like(K)).b == 0)

    def test_one_hot_token(self):
        Q = np.zeros((2, 2, 1))
        Q[0, 0, 0] = 1
        np.testing.assert_allclose(circulant_scores(Q, Q).b, [0.25, 0, 0, 0], atol=1e-16)
        np.testing.assert_allclose(circulant_scores_naive(Q, Q).b, [0.25, 0, 0, 0], atol=1e-16)

    def test_matches_offset_loop(self, rng):
        Q, K = tokens(rng, 3, 4, 2, 2)
        np.testing.assert_allclose(circulant_scores(Q, K).b, offset_scores(Q, K), atol=1e-10)

    def test_fast_and_naive_agree(self, rng):
        for _ in range(20):
            H, W = rng.integers(1, 9, size=2)
            d = int(rng.choice([1, 2, 8]))
            Q, K = tokens(rng, H, W, d, 2)
            np.testing.assert_allclose(circulant_scores(Q, K).b, circulant_scores_naive(Q, K).b, atol=1e-9)

    def test_naive_guard(self):
        Q = np.zeros((65, 64, 1))
        with pytest.raises(TooLarge):
            circulant_scores_naive(Q, Q)

    @given(st.integers(1, 5), st.integers(1, 5), st.integers(0, 4), st.integers(0, 4),
           st.integers(0, 2**32 - 1))
    def test_invariant_under_joint_roll(self, H, W, dh, dw, seed):
        Q, K = tokens(np.random.default_rng(seed), H, W, 2, 2)
        roll = lambda a: np.roll(a, (dh, dw), axis=(0, 1))  # noqa: E731
        np.testing.assert_allclose(circulant_scores(roll(Q), roll(K)).b, circulant_scores(Q, K).b, atol=1e-12)


class TestSoftmaxFirstRow:
    def test_uniform(self):
        out = softmax_first_row(BccbKernel(np.zeros(4), GridShape(2, 2)))
        np.testing.assert_allclose(out.b, [0.25] * 4, atol=1e-16)

    def test_ln2(self):
        out = softmax_first_row(BccbKernel([math.log(2), 0, 0, 0], GridShape(2, 2)))
        np.testing.assert_allclose(out.b, [0.4, 0.2, 0.2, 0.2], atol=1e-15)

    def test_commutes_with_materialize(self, rng):
        k = BccbKernel(rng.standard_normal(9), GridShape(3, 3))
        np.testing.assert_allclose(bccb_materialize(softmax_first_row(k)),
                                   dense_softmax_rows(bccb_materialize(k)), atol=1e-12)


class TestCirculantAttention:
    def test_zero_scores_average(self, rng):
        V = rng.standard_normal((3, 4, 2))
        out = circulant_attention(np.zeros_like(V), np.zeros_like(V), V)
        np.testing.assert_allclose(out, np.broadcast_to(V.mean(axis=(0, 1)), V.shape), atol=1e-14)

    def test_post_with_ones_is_none(self, rng):
        Q, K, V = tokens(rng, 3, 4, 2)
        np.testing.assert_allclose(circulant_attention(Q, K, V, "post", np.ones_like(V)),
                                   circulant_attention(Q, K, V), atol=0)

    @pytest.mark.parametrize("mode", ["none", "pre", "post"])
    def test_dense_oracle(self, rng, mode):
        Q, K, V, T = tokens(rng, 3, 4, 2, 4)
        # dense oracle built independently of the package projection path
        A = Q.reshape(12, 2) @ K.reshape(12, 2).T / math.sqrt(2)
        a = np.array([np.mean([A[i, j] for i in range(12) for j in range(12)
                               if ((j // 4 - i // 4) % 3) * 4 + (j % 4 - i % 4) % 4 == k]) for k in range(12)])
        P = dense_softmax_rows(bccb_materialize(BccbKernel(a, GridShape(3, 4))))
        v = (V * T if mode == "pre" else V).reshape(12, 2)
        ref = (P @ v).reshape(3, 4, 2) * (T if mode == "post" else 1)
        np.testing.assert_allclose(circulant_attention(Q, K, V, mode, T), ref, atol=1e-9)

    @pytest.mark.parametrize("mode", ["pre", "post"])
    def test_missing_reweight(self, rng, mode):
        Q, K, V = tokens(rng, 2, 2, 1)
        with pytest.raises(MissingReweight):
            circulant_attention(Q, K, V, mode)

    def test_bad_mode(self, rng):
        Q, K, V = tokens(rng, 2, 2, 1)
        with pytest.raises(ValueError):
            circulant_attention(Q, K, V, "sideways")

    def test_reweight_shape(self, rng):
        Q, K, V = tokens(rng, 2, 2, 2)
        with pytest.raises(ShapeMismatch):
            circulant_attention(Q, K, V, "post", np.ones((2, 2, 1)))

    @pytest.mark.parametrize("d", [1, 2, 7])
    def test_single_token(self, rng, d):
        Q, K, V = tokens(rng, 1, 1, d)
        np.testing.assert_allclose(circulant_attention(Q, K, V), V, atol=1e-15)

    def test_on_vit_grid_sizes(self, rng):
        for side in (14, 28):
            Q, K, V = (0.3 * a for a in tokens(rng, side, side, 2))
            np.testing.assert_allclose(circulant_attention(Q, K, V), circulant_attention_naive(Q, K, V), atol=1e-9)


@given(st.integers(1, 8), st.integers(1, 8), st.sampled_from([1, 2, 8]),
       st.sampled_from(list(Reweighting)), st.integers(0, 2**32 - 1))
def test_fast_matches_naive(H, W, d, mode, seed):
    Q, K, V, T = tokens(np.random.default_rng(seed), H, W, d, 4)
    np.testing.assert_allclose(circulant_attention(Q, K, V, mode, T),
                               circulant_attention_naive(Q, K, V, mode, T), atol=1e-9)


@given(st.integers(1, 6), st.integers(1, 6), st.integers(1, 4), st.integers(0, 2**32 - 1))
def test_structural_properties(H, W, d, seed):
    r = np.random.default_rng(seed)
    Q, K, V = tokens(r, H, W, d)
    P = bccb_materialize(softmax_first_row(circulant_scores(Q, K)))
    np.testing.assert_allclose(P.sum(axis=0), 1, atol=1e-12)
    np.testing.assert_allclose(P.sum(axis=1), 1, atol=1e-12)
    O = circulant_attention(Q, K, V)
    assert np.all(O >= V.min(axis=(0, 1)) - 1e-12)
    assert np.all(O <= V.max(axis=(0, 1)) + 1e-12)
    dh, dw = int(r.integers(0, H)), int(r.integers(0, W))
    roll = lambda a: np.roll(a, (dh, dw), axis=(0, 1))  # noqa: E731
    np.testing.assert_allclose(circulant_attention(roll(Q), roll(K), roll(V)), roll(O), atol=1e-10)


class TestReweighting:
    def test_zero(self):
        assert np.all(compute_reweighting(np.zeros((2, 2, 3)), np.ones((3, 2))) == 0)

    def test_silu_values(self):
        T = compute_reweighting(np.array([[[1.0], [-1.0]]]), np.array([[1.0]]))
        np.testing.assert_allclose(T.ravel(), [0.7310585786300049, -0.2689414213699951], rtol=1e-12)

    def test_shape(self):
        with pytest.raises(ShapeMismatch):
            compute_reweighting(np.zeros((2, 2, 3)), np.ones((4, 2)))


class TestMultihead:
    def test_single_head_identity_wo(self, rng):
        cfg = AttentionConfig(GridShape(3, 3), heads=1, head_dim=4, model_dim=4, reweighting="none", seed=3)
        w = ProjectionWeights.init(cfg)
        w = ProjectionWeights(w.wq, w.wk, w.wv, w.wt, np.eye(4))
        x = rng.standard_normal((3, 3, 4))
        expected = circulant_attention(x @ w.wq[0], x @ w.wk[0], x @ w.wv[0])
        np.testing.assert_allclose(multihead_circulant_attention(x, w, cfg), expected, atol=1e-14)

    def test_d1_many_heads(self, rng):
        cfg = AttentionConfig(GridShape(4, 4), heads=8, head_dim=1, model_dim=8, seed=1)
        out = multihead_circulant_attention(rng.standard_normal((4, 4, 8)), ProjectionWeights.init(cfg), cfg)
        assert out.shape == (4, 4, 8) and np.all(np.isfinite(out))

    @pytest.mark.parametrize("mode", ["none", "pre", "post"])
    def test_matches_naive_assembly(self, rng, mode):
        cfg = AttentionConfig(GridShape(3, 4), heads=4, head_dim=2, model_dim=8, reweighting=mode, seed=9)
        w = ProjectionWeights.init(cfg)
        x = rng.standard_normal((3, 4, 8))
        np.testing.assert_allclose(multihead_circulant_attention(x, w, cfg),
                                   multihead_circulant_attention(x, w, cfg, naive=True), atol=1e-9)

    def test_default_mode_is_post(self):
        cfg = AttentionConfig(GridShape(2, 2), heads=1, head_dim=1, model_dim=1)
        assert cfg.reweighting is Reweighting.POST

    def test_config_validation(self):
        with pytest.raises(ShapeMismatch):
            AttentionConfig(GridShape(2, 2), heads=3, head_dim=2, model_dim=8)

    def test_weights_deterministic_and_bounded(self):
        cfg = AttentionConfig(GridShape(2, 2), heads=2, head_dim=8, model_dim=16, seed=42)
        a, b = ProjectionWeights.init(cfg), ProjectionWeights.init(cfg)
        for name in ("wq", "wk", "wv", "wt", "wo"):
            assert np.array_equal(getattr(a, name), getattr(b, name))
            assert np.abs(getattr(a, name)).max() <= 0.25
