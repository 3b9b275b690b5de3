"""Spatial cluster tokens: k-means over coordinates, token = MLP(mean fused
representation of members) + sinusoidal positional encoding of the cluster id.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from urbanrisk.data.records import BuildingRecord
from urbanrisk.encode.fusion import _ff_apply, _ff_params

KMEANS_MAX_ITER = 100


def kmeans(
    points: np.ndarray, k: int, seed: int, max_iter: int = KMEANS_MAX_ITER
) -> tuple[np.ndarray, np.ndarray, float]:
    """Lloyd's algorithm with seeded farthest-point initialization.

    Returns (assignments, centroids, objective). Stops at an assignment
    fixpoint or after max_iter iterations; the objective is non-increasing
    across iterations.
    """
    points = np.asarray(points, dtype=float)
    n = len(points)
    if not 1 <= k <= n:
        raise ValueError(f"k must be in [1, {n}], got {k}")

    rng = np.random.default_rng(seed)
    centers = [points[int(rng.integers(n))]]
    for _ in range(1, k):
        d2 = np.min(
            [np.sum((points - c) ** 2, axis=1) for c in centers], axis=0
        )
        centers.append(points[int(np.argmax(d2))])
    centroids = np.array(centers)

    assign = np.full(n, -1)
    for _ in range(max_iter):
        d2 = np.sum((points[:, None, :] - centroids[None, :, :]) ** 2, axis=2)
        new_assign = np.argmin(d2, axis=1)
        if np.array_equal(new_assign, assign):
            break
        assign = new_assign
        for c in range(k):
            members = points[assign == c]
            if len(members):
                centroids[c] = members.mean(axis=0)
            else:
                # re-seed an empty cluster at the farthest point (deterministic)
                far = np.argmax(np.min(d2, axis=1))
                centroids[c] = points[far]
    objective = float(np.sum((points - centroids[assign]) ** 2))
    return assign, centroids, objective


def sinusoidal_pe(position: int, dim: int) -> np.ndarray:
    """Transformer-style positional encoding; deterministic, seed-free."""
    pe = np.zeros(dim)
    idx = np.arange(0, dim, 2)
    rates = np.power(10000.0, -idx / dim)
    pe[0::2] = np.sin(position * rates)
    pe[1::2] = np.cos(position * rates[: len(pe[1::2])])
    return pe


@dataclass(frozen=True)
class ClusterToken:
    cluster_id: int
    vector: np.ndarray
    member_ids: tuple[str, ...]


class TokenEncoder:
    """Owns the token MLP (one hidden layer at model width, tanh)."""

    def __init__(self, fused_dim: int, model_dim: int, seed: int):
        self.model_dim = model_dim
        self.mlp = _ff_params(np.random.default_rng(seed), fused_dim, model_dim, model_dim)

    def token(self, cluster_id: int, member_fused: np.ndarray) -> np.ndarray:
        pooled = np.asarray(member_fused, dtype=float).mean(axis=0)
        return _ff_apply(self.mlp, pooled) + sinusoidal_pe(cluster_id, self.model_dim)


def cluster_tokens(
    buildings: Sequence[BuildingRecord],
    k: int,
    fused: Sequence[np.ndarray],
    encoder: TokenEncoder,
    seed: int,
) -> list[ClusterToken]:
    """Partition buildings into K spatial clusters and emit one token each.

    Every building lands in exactly one cluster; token order follows cluster id.
    """
    if len(buildings) != len(fused):
        raise ValueError("need one fused representation per building")
    points = np.array([[b.lat, b.lon] for b in buildings])
    assign, _, _ = kmeans(points, k, seed)
    tokens = []
    fused_arr = np.asarray(fused, dtype=float)
    for c in range(k):
        member_idx = np.flatnonzero(assign == c)
        member_ids = tuple(buildings[i].id for i in member_idx)
        if len(member_idx) == 0:
            vector = sinusoidal_pe(c, encoder.model_dim)
        else:
            vector = encoder.token(c, fused_arr[member_idx])
        tokens.append(ClusterToken(cluster_id=c, vector=vector, member_ids=member_ids))
    return tokens
