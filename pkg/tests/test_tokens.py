from __future__ import annotations

import itertools

import numpy as np
import pytest

from urbanrisk.encode.fusion import _ff_apply
from urbanrisk.encode.tokens import TokenEncoder, cluster_tokens, kmeans, sinusoidal_pe

from helpers import make_record


class TestKmeans:
    def test_k_equals_one_collapses_to_global_mean(self):
        rng = np.random.default_rng(0)
        pts = rng.normal(size=(20, 2))
        assign, centroids, _ = kmeans(pts, 1, seed=1)
        assert set(assign) == {0}
        assert np.allclose(centroids[0], pts.mean(axis=0))

    def test_invalid_k(self):
        pts = np.zeros((3, 2))
        with pytest.raises(ValueError, match="k must be"):
            kmeans(pts, 4, seed=0)
        with pytest.raises(ValueError, match="k must be"):
            kmeans(pts, 0, seed=0)

    def test_two_separated_clouds_match_bruteforce(self):
        rng = np.random.default_rng(5)
        a = rng.normal(loc=(0, 0), scale=0.05, size=(6, 2))
        b = rng.normal(loc=(5, 5), scale=0.05, size=(6, 2))
        pts = np.vstack([a, b])
        assign, _, obj = kmeans(pts, 2, seed=3)

        # brute-force minimizer over all 2-partitions of 12 points
        best = np.inf
        for labels in itertools.product([0, 1], repeat=len(pts)):
            labels = np.array(labels)
            if len(set(labels)) < 2:
                continue
            cost = 0.0
            for c in (0, 1):
                members = pts[labels == c]
                cost += np.sum((members - members.mean(axis=0)) ** 2)
            best = min(best, cost)
        assert obj == pytest.approx(best, rel=1e-9)
        assert set(assign[:6]) != set(assign[6:]) or assign[0] != assign[-1]

    def test_pure_function_of_inputs_and_seed(self):
        rng = np.random.default_rng(7)
        pts = rng.normal(size=(30, 2))
        a1, c1, o1 = kmeans(pts, 4, seed=9)
        a2, c2, o2 = kmeans(pts, 4, seed=9)
        assert np.array_equal(a1, a2)
        assert np.array_equal(c1, c2)
        assert o1 == o2

    def test_assignment_is_fixpoint(self):
        rng = np.random.default_rng(11)
        pts = rng.normal(size=(40, 2))
        assign, centroids, _ = kmeans(pts, 5, seed=2)
        d2 = np.sum((pts[:, None, :] - centroids[None, :, :]) ** 2, axis=2)
        assert np.array_equal(np.argmin(d2, axis=1), assign)


class TestPositionalEncoding:
    def test_deterministic_and_seed_free(self):
        assert np.array_equal(sinusoidal_pe(3, 16), sinusoidal_pe(3, 16))

    def test_distinct_positions_differ(self):
        for a, b in itertools.combinations(range(12), 2):
            assert not np.allclose(sinusoidal_pe(a, 16), sinusoidal_pe(b, 16))

    def test_values_match_formula(self):
        pe = sinusoidal_pe(5, 8)
        assert pe[0] == pytest.approx(np.sin(5.0))
        assert pe[1] == pytest.approx(np.cos(5.0))
        assert pe[2] == pytest.approx(np.sin(5 * 10000 ** (-2 / 8)))


class TestClusterTokens:
    def _buildings(self, n=9):
        return [
            make_record(rid=f"b{i}", lat=55.0 + 0.01 * (i % 3), lon=12.0 + 0.01 * (i // 3))
            for i in range(n)
        ]

    def test_single_cluster_token_is_mlp_of_global_mean_plus_pe(self):
        buildings = self._buildings()
        fused = [np.full(6, float(i)) for i in range(len(buildings))]
        enc = TokenEncoder(fused_dim=6, model_dim=8, seed=4)
        tokens = cluster_tokens(buildings, 1, fused, enc, seed=0)
        assert len(tokens) == 1
        expect = _ff_apply(enc.mlp, np.mean(fused, axis=0)) + sinusoidal_pe(0, 8)
        assert np.allclose(tokens[0].vector, expect, atol=1e-12)
        assert set(tokens[0].member_ids) == {b.id for b in buildings}

    def test_identical_fused_members_pre_pe_token_is_mlp_of_that_vector(self):
        buildings = self._buildings(4)
        shared = np.arange(6.0)
        enc = TokenEncoder(fused_dim=6, model_dim=8, seed=4)
        tokens = cluster_tokens(buildings, 1, [shared] * 4, enc, seed=0)
        pre_pe = tokens[0].vector - sinusoidal_pe(0, 8)
        assert np.allclose(pre_pe, _ff_apply(enc.mlp, shared), atol=1e-12)

    def test_every_building_in_exactly_one_cluster(self):
        buildings = self._buildings(12)
        fused = [np.zeros(6)] * 12
        enc = TokenEncoder(fused_dim=6, model_dim=8, seed=4)
        tokens = cluster_tokens(buildings, 3, fused, enc, seed=1)
        counted = [bid for t in tokens for bid in t.member_ids]
        assert sorted(counted) == sorted(b.id for b in buildings)
        assert [t.cluster_id for t in tokens] == [0, 1, 2]

    def test_mismatched_lengths_rejected(self):
        enc = TokenEncoder(fused_dim=6, model_dim=8, seed=4)
        with pytest.raises(ValueError, match="one fused"):
            cluster_tokens(self._buildings(3), 1, [np.zeros(6)] * 2, enc, seed=0)
