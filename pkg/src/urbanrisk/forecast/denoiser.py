"""Residual feed-forward noise predictor with hand-written backprop.

The network maps (x_t, timestep embedding, conditioning) to a noise estimate
of the same dimension as x_t. Parameters live in named groups (input layer,
each residual block, output layer) so staged training can freeze a prefix.

Backprop is explicit numpy so that gradients can be verified against finite
differences, which the acceptance suite does.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

def timestep_embedding(t: np.ndarray, dim: int) -> np.ndarray:
    """Sinusoidal embedding of integer steps; matches the PE construction.

    Vectorized equivalent of stacking sinusoidal_pe(t_i, dim) row by row.
    """
    t = np.atleast_1d(t).astype(float)
    pe = np.zeros((len(t), dim))
    idx = np.arange(0, dim, 2)
    rates = np.power(10000.0, -idx / dim)
    pe[:, 0::2] = np.sin(t[:, None] * rates)
    pe[:, 1::2] = np.cos(t[:, None] * rates[: pe[:, 1::2].shape[1]])
    return pe


@dataclass
class Denoiser:
    target_dim: int
    cond_dim: int
    hidden_dim: int = 64
    n_blocks: int = 2
    t_embed_dim: int = 16
    params: dict[str, np.ndarray] = field(default_factory=dict)
    trained: bool = False

    @classmethod
    def create(
        cls,
        target_dim: int,
        cond_dim: int,
        hidden_dim: int = 64,
        n_blocks: int = 2,
        t_embed_dim: int = 16,
        seed: int = 0,
    ) -> "Denoiser":
        rng = np.random.default_rng(seed)
        d_in = target_dim + t_embed_dim + cond_dim
        params: dict[str, np.ndarray] = {
            "in.w": rng.normal(0, 1 / np.sqrt(d_in), size=(hidden_dim, d_in)),
            "in.b": np.zeros(hidden_dim),
        }
        for b in range(n_blocks):
            params[f"blk{b}.w1"] = rng.normal(0, 1 / np.sqrt(hidden_dim), size=(hidden_dim, hidden_dim))
            params[f"blk{b}.b1"] = np.zeros(hidden_dim)
            params[f"blk{b}.w2"] = rng.normal(0, 1 / np.sqrt(hidden_dim), size=(hidden_dim, hidden_dim))
            params[f"blk{b}.b2"] = np.zeros(hidden_dim)
        params["out.w"] = rng.normal(0, 1 / np.sqrt(hidden_dim), size=(target_dim, hidden_dim))
        params["out.b"] = np.zeros(target_dim)
        return cls(
            target_dim=target_dim,
            cond_dim=cond_dim,
            hidden_dim=hidden_dim,
            n_blocks=n_blocks,
            t_embed_dim=t_embed_dim,
            params=params,
        )

    # -- parameter groups -----------------------------------------------

    def group_names(self) -> list[str]:
        return ["in"] + [f"blk{b}" for b in range(self.n_blocks)] + ["out"]

    def keys_of_group(self, group: str) -> list[str]:
        return [k for k in self.params if k.startswith(group + ".")]

    # -- forward / backward ----------------------------------------------

    def _inputs(self, x_t: np.ndarray, t, cond: np.ndarray) -> np.ndarray:
        x_t = np.atleast_2d(np.asarray(x_t, dtype=float))
        cond = np.atleast_2d(np.asarray(cond, dtype=float))
        if cond.shape[1] != self.cond_dim:
            raise ValueError(f"conditioning dim {cond.shape[1]} != expected {self.cond_dim}")
        if x_t.shape[1] != self.target_dim:
            raise ValueError(f"target dim {x_t.shape[1]} != expected {self.target_dim}")
        temb = timestep_embedding(np.broadcast_to(np.asarray(t), (len(x_t),)), self.t_embed_dim)
        return np.concatenate([x_t, temb, cond], axis=1)

    def forward(self, x_t: np.ndarray, t, cond: np.ndarray) -> np.ndarray:
        out, _ = self._forward_cached(self._inputs(x_t, t, cond))
        return out[0] if np.ndim(x_t) == 1 else out

    __call__ = forward

    def _forward_cached(self, inputs: np.ndarray):
        p = self.params
        cache: dict[str, np.ndarray] = {"inputs": inputs}
        h = inputs @ p["in.w"].T + p["in.b"]
        cache["h_in"] = h
        for b in range(self.n_blocks):
            pre = h @ p[f"blk{b}.w1"].T + p[f"blk{b}.b1"]
            act = np.tanh(pre)
            cache[f"act{b}"] = act
            cache[f"h{b}"] = h
            h = h + act @ p[f"blk{b}.w2"].T + p[f"blk{b}.b2"]
        cache["h_out"] = h
        out = h @ p["out.w"].T + p["out.b"]
        return out, cache

    def _backward(self, cache: dict, d_out: np.ndarray) -> dict[str, np.ndarray]:
        """Gradients of a scalar loss with upstream d_out = dL/d(output)."""
        p = self.params
        grads: dict[str, np.ndarray] = {}
        grads["out.w"] = d_out.T @ cache["h_out"]
        grads["out.b"] = d_out.sum(axis=0)
        dh = d_out @ p["out.w"]
        for b in reversed(range(self.n_blocks)):
            act, h_prev = cache[f"act{b}"], cache[f"h{b}"]
            grads[f"blk{b}.w2"] = dh.T @ act
            grads[f"blk{b}.b2"] = dh.sum(axis=0)
            d_act = dh @ p[f"blk{b}.w2"]
            d_pre = d_act * (1.0 - act**2)
            grads[f"blk{b}.w1"] = d_pre.T @ h_prev
            grads[f"blk{b}.b1"] = d_pre.sum(axis=0)
            dh = dh + d_pre @ p[f"blk{b}.w1"]  # residual skip + block path
        grads["in.w"] = dh.T @ cache["inputs"]
        grads["in.b"] = dh.sum(axis=0)
        return grads

    # -- serialization -----------------------------------------------------

    def meta(self) -> dict:
        return {
            "target_dim": self.target_dim,
            "cond_dim": self.cond_dim,
            "hidden_dim": self.hidden_dim,
            "n_blocks": self.n_blocks,
            "t_embed_dim": self.t_embed_dim,
            "trained": self.trained,
        }

    @classmethod
    def from_meta(cls, meta: dict, params: dict[str, np.ndarray]) -> "Denoiser":
        return cls(
            target_dim=int(meta["target_dim"]),
            cond_dim=int(meta["cond_dim"]),
            hidden_dim=int(meta["hidden_dim"]),
            n_blocks=int(meta["n_blocks"]),
            t_embed_dim=int(meta["t_embed_dim"]),
            params=params,
            trained=bool(meta["trained"]),
        )
