from __future__ import annotations

import numpy as np
import pytest

from urbanrisk.data.records import FEATURE_SCHEMA
from urbanrisk.encode.fusion import (
    MODALITIES,
    CrossAttention,
    FusionStack,
    ModalityEmbedding,
    RepresentationConfig,
    modality_dropout,
)

from helpers import make_record

GROUP_DIMS = {g: len(d) for g, d in FEATURE_SCHEMA.items()}


def _me(config: RepresentationConfig, seed=0) -> ModalityEmbedding:
    rng = np.random.default_rng(seed)
    return ModalityEmbedding(
        z_img=rng.normal(size=config.dim_img),
        z_tab=rng.normal(size=config.dim_tab),
        z_graph=rng.normal(size=config.dim_graph),
        z_ts=rng.normal(size=config.dim_ts),
    )


class TestCrossAttention:
    def test_single_token_returns_its_value_projection(self):
        rng = np.random.default_rng(1)
        attn = CrossAttention(dim_query=6, dim_kv=5, dim_out=4, rng=rng)
        q = rng.normal(size=6)
        kv = rng.normal(size=(1, 5))
        out = attn(q, kv)
        assert np.allclose(out, (kv @ attn.w_v.T)[0], atol=1e-12)

    def test_identical_tokens_give_uniform_average(self):
        rng = np.random.default_rng(2)
        attn = CrossAttention(dim_query=6, dim_kv=5, dim_out=4, rng=rng)
        q = rng.normal(size=6)
        token = rng.normal(size=5)
        kv = np.stack([token] * 7)
        weights = attn.attention_weights(q, kv)
        assert np.allclose(weights, 1 / 7, atol=1e-12)
        assert np.allclose(attn(q, kv), attn.w_v @ token, atol=1e-12)

    def test_rows_sum_to_one_random_case(self):
        rng = np.random.default_rng(3)
        attn = CrossAttention(dim_query=4, dim_kv=4, dim_out=4, rng=rng)
        q = rng.normal(size=(3, 4))
        kv = rng.normal(size=(4, 4))
        weights = attn.attention_weights(q, kv)
        # direct softmax recomputation
        logits = (q @ attn.w_q.T) @ (kv @ attn.w_k.T).T / 2.0
        expect = np.exp(logits - logits.max(axis=1, keepdims=True))
        expect /= expect.sum(axis=1, keepdims=True)
        assert np.allclose(weights.sum(axis=1), 1.0, atol=1e-6)
        assert np.allclose(weights, expect, atol=1e-9)

    def test_dim_mismatch_rejected(self):
        attn = CrossAttention(4, 4, 4, np.random.default_rng(0))
        with pytest.raises(ValueError, match="query dim"):
            attn(np.zeros(5), np.zeros((2, 4)))
        with pytest.raises(ValueError, match="key/value dim"):
            attn(np.zeros(4), np.zeros((2, 5)))


class TestFuse:
    def test_paper_default_dims_give_1280(self):
        config = RepresentationConfig()
        assert config.fused_dim == 1280
        stack = FusionStack(config, seed=5, group_dims=GROUP_DIMS)
        fused = stack.fuse(_me(config))
        assert fused.shape == (1280,)

    def test_small_dims_arithmetic(self):
        config = RepresentationConfig(
            dim_img=8, dim_tab=4, dim_graph=4, dim_ts=4, attn_out=8, model_dim=8, prompt_dim=8
        )
        assert config.fused_dim == 20
        stack = FusionStack(config, seed=5, group_dims=GROUP_DIMS)
        assert stack.fuse(_me(config)).shape == (20,)

    def test_masked_modalities_zero_segments(self):
        config = RepresentationConfig.small()
        stack = FusionStack(config, seed=5, group_dims=GROUP_DIMS)
        me = _me(config).masked({"tab", "graph", "ts"})
        fused = stack.fuse(me)
        tail = config.dim_tab + config.dim_graph + config.dim_ts
        assert not fused[-tail:].any()

    def test_dim_sum_over_random_configs(self):
        rng = np.random.default_rng(9)
        for _ in range(20):
            dims = rng.integers(2, 24, size=5)
            config = RepresentationConfig(
                dim_img=int(dims[0]),
                dim_tab=int(dims[1]),
                dim_graph=int(dims[2]),
                dim_ts=int(dims[3]),
                attn_out=int(dims[4]),
                model_dim=8,
                prompt_dim=8,
            )
            stack = FusionStack(config, seed=1, group_dims=GROUP_DIMS)
            fused = stack.fuse(_me(config, seed=int(dims.sum())))
            assert fused.shape == (int(dims[1] + dims[2] + dims[3] + dims[4]),)

    def test_embed_record_marks_masked_groups(self):
        config = RepresentationConfig.small()
        stack = FusionStack(config, seed=5, group_dims=GROUP_DIMS)
        rec = make_record(masks={"climate": False})
        me = stack.embed(rec)
        assert me.present["ts"] is False
        assert not me.z_ts.any()
        assert me.present["img"] is True


class TestModalityDropout:
    def test_rate_zero_identity(self):
        config = RepresentationConfig.small()
        me = _me(config)
        out = modality_dropout(me, 0.0, seed=1)
        assert all(out.present[m] for m in MODALITIES)
        assert np.array_equal(out.z_img, me.z_img)

    def test_rate_one_masks_all(self):
        config = RepresentationConfig.small()
        out = modality_dropout(_me(config), 1.0, seed=1)
        assert not any(out.present[m] for m in MODALITIES)
        assert not out.z_tab.any()

    def test_invalid_rate(self):
        with pytest.raises(ValueError, match="rate"):
            modality_dropout(_me(RepresentationConfig.small()), 1.2, seed=0)

    def test_empirical_mask_frequency(self):
        config = RepresentationConfig.small()
        me = _me(config)
        rate = 0.2
        counts = {m: 0 for m in MODALITIES}
        n = 10_000
        for s in range(n):
            out = modality_dropout(me, rate, seed=s)
            for m in MODALITIES:
                counts[m] += not out.present[m]
        for m in MODALITIES:
            assert abs(counts[m] / n - rate) < 0.01

    def test_deterministic_given_seed(self):
        config = RepresentationConfig.small()
        me = _me(config)
        a = modality_dropout(me, 0.5, seed=123)
        b = modality_dropout(me, 0.5, seed=123)
        assert a.present == b.present
