"""Modality embeddings and cross-modal attention fusion.

Pretrained modality encoders are replaced by small seeded feed-forward
stand-ins that emit the documented output dimensions. The fused vector is
the attended imagery query concatenated with the tabular, graph, and time
series embeddings, so with default dimensions (512, 256, 256, 256) the fused
dimension is 1280.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from urbanrisk.data.records import BuildingRecord

MODALITIES = ("img", "tab", "graph", "ts")

# Which feature groups feed each modality stand-in.
MODALITY_SOURCES: dict[str, tuple[str, ...]] = {
    "img": ("geo",),
    "tab": ("struct", "demo", "infra"),
    "graph": ("transport",),
    "ts": ("climate",),
}


@dataclass(frozen=True)
class RepresentationConfig:
    dim_img: int = 512
    dim_tab: int = 256
    dim_graph: int = 256
    dim_ts: int = 256
    attn_out: int = 512  # inferred so the default fused dim lands on 1280
    model_dim: int = 1024
    prompt_dim: int = 1024

    @property
    def fused_dim(self) -> int:
        return self.attn_out + self.dim_tab + self.dim_graph + self.dim_ts

    @classmethod
    def small(cls) -> "RepresentationConfig":
        """Desk-scale preset used by tests and the end-to-end pipeline."""
        return cls(
            dim_img=16, dim_tab=16, dim_graph=8, dim_ts=8, attn_out=16, model_dim=32, prompt_dim=12
        )


@dataclass(frozen=True)
class ModalityEmbedding:
    z_img: np.ndarray
    z_tab: np.ndarray
    z_graph: np.ndarray
    z_ts: np.ndarray
    present: dict[str, bool] = field(default_factory=lambda: {m: True for m in MODALITIES})

    def vector(self, name: str) -> np.ndarray:
        return getattr(self, f"z_{name}")

    def masked(self, names: set[str]) -> "ModalityEmbedding":
        updates = {}
        present = dict(self.present)
        for name in names:
            updates[f"z_{name}"] = np.zeros_like(self.vector(name))
            present[name] = False
        return replace(self, present=present, **updates)


class CrossAttention:
    """Scaled dot-product attention with learned (seeded) projections."""

    def __init__(self, dim_query: int, dim_kv: int, dim_out: int, rng: np.random.Generator):
        self.w_q = rng.normal(0, 1 / np.sqrt(dim_query), size=(dim_out, dim_query))
        self.w_k = rng.normal(0, 1 / np.sqrt(dim_kv), size=(dim_out, dim_kv))
        self.w_v = rng.normal(0, 1 / np.sqrt(dim_kv), size=(dim_out, dim_kv))

    def attention_weights(self, queries: np.ndarray, keys_values: np.ndarray) -> np.ndarray:
        queries = np.atleast_2d(queries)
        keys_values = np.atleast_2d(keys_values)
        if queries.shape[1] != self.w_q.shape[1]:
            raise ValueError(
                f"query dim {queries.shape[1]} does not match projection {self.w_q.shape[1]}"
            )
        if keys_values.shape[1] != self.w_k.shape[1]:
            raise ValueError(
                f"key/value dim {keys_values.shape[1]} does not match projection {self.w_k.shape[1]}"
            )
        q = queries @ self.w_q.T
        k = keys_values @ self.w_k.T
        logits = (q @ k.T) / np.sqrt(self.w_q.shape[0])
        logits -= logits.max(axis=1, keepdims=True)
        weights = np.exp(logits)
        return weights / weights.sum(axis=1, keepdims=True)

    def __call__(self, queries: np.ndarray, keys_values: np.ndarray) -> np.ndarray:
        weights = self.attention_weights(queries, keys_values)
        v = np.atleast_2d(keys_values) @ self.w_v.T
        out = weights @ v
        return out[0] if np.ndim(queries) == 1 else out


def modality_dropout(me: ModalityEmbedding, rate: float, seed: int) -> ModalityEmbedding:
    """Independently mask each modality with the given probability."""
    if not 0.0 <= rate <= 1.0:
        raise ValueError(f"dropout rate must be in [0, 1], got {rate}")
    rng = np.random.default_rng(seed)
    draws = rng.uniform(size=len(MODALITIES))
    to_mask = {m for m, u in zip(MODALITIES, draws) if u < rate}
    return me.masked(to_mask) if to_mask else me


def _ff_params(rng: np.random.Generator, dim_in: int, dim_hidden: int, dim_out: int):
    return {
        "w1": rng.normal(0, 1 / np.sqrt(dim_in), size=(dim_hidden, dim_in)),
        "b1": np.zeros(dim_hidden),
        "w2": rng.normal(0, 1 / np.sqrt(dim_hidden), size=(dim_out, dim_hidden)),
    }


def _ff_apply(params: dict, x: np.ndarray) -> np.ndarray:
    h = np.tanh(params["w1"] @ x + params["b1"])
    return params["w2"] @ h


class FusionStack:
    """Stand-in modality encoders plus the attention fusion head.

    All parameters are created from a seed and then frozen: the stack is a
    deterministic feature map, not a trained component.
    """

    def __init__(self, config: RepresentationConfig, seed: int, group_dims: dict[str, int]):
        self.config = config
        rng = np.random.default_rng(seed)
        dims = {
            "img": config.dim_img,
            "tab": config.dim_tab,
            "graph": config.dim_graph,
            "ts": config.dim_ts,
        }
        self.encoders = {}
        for name in MODALITIES:
            dim_in = sum(group_dims[g] for g in MODALITY_SOURCES[name])
            self.encoders[name] = _ff_params(rng, dim_in, max(8, dims[name]), dims[name])
        self.attn = CrossAttention(
            dim_query=config.dim_img,
            dim_kv=max(config.dim_tab, config.dim_graph, config.dim_ts),
            dim_out=config.attn_out,
            rng=rng,
        )
        self._kv_dim = max(config.dim_tab, config.dim_graph, config.dim_ts)

    def embed(self, record: BuildingRecord) -> ModalityEmbedding:
        vectors = {}
        present = {}
        for name in MODALITIES:
            groups = MODALITY_SOURCES[name]
            observed = any(record.masks.get(g, True) for g in groups)
            x = np.concatenate([record.features[g] for g in groups])
            z = _ff_apply(self.encoders[name], x) if observed else None
            dims = {
                "img": self.config.dim_img,
                "tab": self.config.dim_tab,
                "graph": self.config.dim_graph,
                "ts": self.config.dim_ts,
            }
            vectors[f"z_{name}"] = z if z is not None else np.zeros(dims[name])
            present[name] = observed
        return ModalityEmbedding(present=present, **vectors)

    def _pad_kv(self, z: np.ndarray) -> np.ndarray:
        if len(z) == self._kv_dim:
            return z
        out = np.zeros(self._kv_dim)
        out[: len(z)] = z
        return out

    def fuse(self, me: ModalityEmbedding) -> np.ndarray:
        """Attended imagery query concatenated with the other three modalities."""
        kv = np.stack([self._pad_kv(me.z_tab), self._pad_kv(me.z_graph), self._pad_kv(me.z_ts)])
        attended = self.attn(me.z_img, kv)
        fused = np.concatenate([attended, me.z_tab, me.z_graph, me.z_ts])
        assert fused.shape == (self.config.fused_dim,)
        return fused

    def fuse_record(self, record: BuildingRecord) -> np.ndarray:
        return self.fuse(self.embed(record))
