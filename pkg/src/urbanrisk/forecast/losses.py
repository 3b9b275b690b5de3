"""Training objectives: noise-prediction MSE plus weighted task losses.

The task losses compare the implied clean-target estimate against the true
targets per component. Each sample's task terms are damped by alpha_bar(t):
at heavily noised steps the implied estimate divides by sqrt(alpha_bar) and
would otherwise blow the loss up by orders of magnitude.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from urbanrisk.forecast.denoiser import Denoiser
from urbanrisk.forecast.schedule import NoiseSchedule, forward_noise

TASK_NAMES = ("flood", "heat", "structure", "transport")


@dataclass(frozen=True)
class LossWeights:
    diffusion: float = 1.0
    flood: float = 0.5
    heat: float = 0.5
    structure: float = 0.3
    transport: float = 0.2

    def __post_init__(self):
        for name in ("diffusion", *TASK_NAMES):
            if getattr(self, name) < 0:
                raise ValueError(f"loss weight {name} must be non-negative")

    def as_tuple(self) -> tuple[float, ...]:
        return (self.diffusion, self.flood, self.heat, self.structure, self.transport)


def combined_loss(
    diffusion: float,
    flood: float,
    heat: float,
    structure: float,
    transport: float,
    weights: LossWeights = LossWeights(),
) -> float:
    """Weighted sum of the five loss components."""
    components = (diffusion, flood, heat, structure, transport)
    for name, v in zip(("diffusion", *TASK_NAMES), components):
        if not math.isfinite(v) or v < 0:
            raise ValueError(f"loss component {name} must be finite and non-negative, got {v}")
    return float(np.dot(components, weights.as_tuple()))


def _draw_batch(x0: np.ndarray, schedule: NoiseSchedule, rng: np.random.Generator):
    n = len(x0)
    t = rng.integers(1, schedule.t_max + 1, size=n)
    eps = rng.normal(size=x0.shape)
    x_t = forward_noise(x0, t, schedule, eps)
    return x_t, t, eps


def diffusion_loss(
    x0: np.ndarray,
    cond: np.ndarray,
    denoiser: Denoiser,
    schedule: NoiseSchedule,
    seed: int,
) -> float:
    """Mean squared noise-prediction error over uniformly sampled steps."""
    x0 = np.atleast_2d(np.asarray(x0, dtype=float))
    if len(x0) == 0:
        raise ValueError("batch must be non-empty")
    rng = np.random.default_rng(seed)
    x_t, t, eps = _draw_batch(x0, schedule, rng)
    eps_hat = denoiser.forward(x_t, t, cond)
    return float(np.mean(np.sum((eps - eps_hat) ** 2, axis=1)))


def batch_losses_and_grads(
    x0: np.ndarray,
    cond: np.ndarray,
    denoiser: Denoiser,
    schedule: NoiseSchedule,
    weights: LossWeights,
    rng: np.random.Generator,
):
    """One training step's loss components and parameter gradients.

    Returns (components dict, combined scalar, grads dict). The gradient is of
    the combined loss. Task component k is the alpha_bar-damped MSE of the
    implied x0 estimate on target column k.
    """
    x0 = np.atleast_2d(np.asarray(x0, dtype=float))
    n, d = x0.shape
    x_t, t, eps = _draw_batch(x0, schedule, rng)
    s_coef, n_coef = schedule.signal_noise_coeffs(t)
    inputs = denoiser._inputs(x_t, t, cond)
    eps_hat, cache = denoiser._forward_cached(inputs)

    err = eps_hat - eps
    loss_diff = float(np.mean(np.sum(err**2, axis=1)))
    d_eps_hat = (2.0 / n) * err * weights.diffusion

    # implied clean estimate: x0_hat = (x_t - n_coef * eps_hat) / s_coef
    x0_hat = (x_t - n_coef[:, None] * eps_hat) / s_coef[:, None]
    x0_err = x0_hat - x0
    damp = (s_coef**2)[:, None]  # alpha_bar(t)
    task_components = {}
    task_weights = (weights.flood, weights.heat, weights.structure, weights.transport)
    for k, name in enumerate(TASK_NAMES):
        task_components[name] = float(np.mean(damp[:, 0] * x0_err[:, k] ** 2))
        # d(task)/d(eps_hat_k) = damp * 2 x0_err_k * (-n_coef / s_coef) / n
        d_eps_hat[:, k] += (
            task_weights[k]
            * (2.0 / n)
            * damp[:, 0]
            * x0_err[:, k]
            * (-n_coef / s_coef)
        )

    grads = denoiser._backward(cache, d_eps_hat)
    components = {"diffusion": loss_diff, **task_components}
    if not all(math.isfinite(v) for v in components.values()):
        # surface to the training loop, which aborts with diagnostics
        return components, float("nan"), grads
    combined = combined_loss(
        loss_diff,
        task_components["flood"],
        task_components["heat"],
        task_components["structure"],
        task_components["transport"],
        weights,
    )
    return components, combined, grads
