"""Gradient training of the denoiser: AdamW, gradient clipping, two stages.

Stage 1 trains every parameter group; stage 2 freezes a configured prefix of
groups (by default the first half) and fine-tunes the rest. Runs are
deterministic under a fixed seed and abort with diagnostics if the loss goes
non-finite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from urbanrisk.forecast.denoiser import Denoiser
from urbanrisk.forecast.losses import LossWeights, batch_losses_and_grads
from urbanrisk.forecast.schedule import NoiseSchedule


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 30
    batch_size: int = 128
    learning_rate: float = 2e-4
    weight_decay: float = 1e-2
    grad_clip: float = 1.0
    cosine_decay: bool = True
    stage: int = 1
    frozen_prefix_groups: int | None = None  # stage 2 default: half the groups
    seed: int = 0


@dataclass
class TrainHistory:
    epochs: list[dict] = field(default_factory=list)

    def append(self, epoch: int, components: dict[str, float], combined: float) -> None:
        self.epochs.append({"epoch": epoch, **components, "combined": combined})

    def combined_series(self) -> list[float]:
        return [e["combined"] for e in self.epochs]

    def to_csv(self) -> str:
        if not self.epochs:
            return ""
        cols = list(self.epochs[0])
        lines = [",".join(cols)]
        for row in self.epochs:
            lines.append(",".join(repr(row[c]) if c != "epoch" else str(row[c]) for c in cols))
        return "\n".join(lines) + "\n"


class AdamW:
    """Decoupled weight decay Adam over a dict of parameter arrays."""

    def __init__(self, keys, lr: float, weight_decay: float):
        self.lr = lr
        self.weight_decay = weight_decay
        self.beta1, self.beta2, self.eps = 0.9, 0.999, 1e-8
        self.m = {k: None for k in keys}
        self.v = {k: None for k in keys}
        self.step_count = 0

    def step(self, params: dict, grads: dict, lr_scale: float = 1.0) -> None:
        self.step_count += 1
        b1, b2 = self.beta1, self.beta2
        bc1 = 1 - b1**self.step_count
        bc2 = 1 - b2**self.step_count
        lr = self.lr * lr_scale
        for k in self.m:
            g = grads[k]
            if self.m[k] is None:
                self.m[k] = np.zeros_like(g)
                self.v[k] = np.zeros_like(g)
            self.m[k] = b1 * self.m[k] + (1 - b1) * g
            self.v[k] = b2 * self.v[k] + (1 - b2) * g**2
            m_hat = self.m[k] / bc1
            v_hat = self.v[k] / bc2
            params[k] -= lr * (m_hat / (np.sqrt(v_hat) + self.eps) + self.weight_decay * params[k])


def _clip_grads(grads: dict, max_norm: float) -> None:
    total = math.sqrt(sum(float(np.sum(g**2)) for g in grads.values()))
    if total > max_norm > 0:
        scale = max_norm / total
        for k in grads:
            grads[k] *= scale


def train(
    x0: np.ndarray,
    cond: np.ndarray,
    denoiser: Denoiser,
    schedule: NoiseSchedule,
    weights: LossWeights = LossWeights(),
    config: TrainConfig = TrainConfig(),
) -> TrainHistory:
    """Minimize the combined loss in place; returns the per-epoch history."""
    x0 = np.atleast_2d(np.asarray(x0, dtype=float))
    cond = np.atleast_2d(np.asarray(cond, dtype=float))
    if len(x0) != len(cond):
        raise ValueError("need one conditioning row per target row")
    if len(x0) == 0:
        raise ValueError("training set is empty")

    groups = denoiser.group_names()
    frozen = 0
    if config.stage == 2:
        frozen = (
            config.frozen_prefix_groups
            if config.frozen_prefix_groups is not None
            else len(groups) // 2
        )
    if frozen > len(groups):
        raise ValueError(f"cannot freeze {frozen} groups; model has {len(groups)}")
    trainable_keys = [k for g in groups[frozen:] for k in denoiser.keys_of_group(g)]

    optimizer = AdamW(trainable_keys, lr=config.learning_rate, weight_decay=config.weight_decay)
    rng = np.random.default_rng(config.seed)
    history = TrainHistory()
    n = len(x0)
    batch = min(config.batch_size, n)
    steps_per_epoch = max(1, n // batch)
    total_steps = config.epochs * steps_per_epoch
    step = 0

    for epoch in range(config.epochs):
        order = rng.permutation(n)
        sums: dict[str, float] = {}
        combined_sum = 0.0
        for s in range(steps_per_epoch):
            idx = order[s * batch : (s + 1) * batch]
            components, combined, grads = batch_losses_and_grads(
                x0[idx], cond[idx], denoiser, schedule, weights, rng
            )
            if not math.isfinite(combined):
                raise RuntimeError(
                    f"non-finite loss at epoch {epoch} step {s}: {components}"
                )
            lr_scale = 1.0
            if config.cosine_decay and total_steps > 1:
                lr_scale = 0.5 * (1.0 + math.cos(math.pi * step / total_steps))
            picked = {k: grads[k] for k in trainable_keys}
            _clip_grads(picked, config.grad_clip)
            optimizer.step(denoiser.params, picked, lr_scale=lr_scale)
            for k, v in components.items():
                sums[k] = sums.get(k, 0.0) + v
            combined_sum += combined
            step += 1
        history.append(
            epoch,
            {k: v / steps_per_epoch for k, v in sums.items()},
            combined_sum / steps_per_epoch,
        )
    denoiser.trained = True
    return history
