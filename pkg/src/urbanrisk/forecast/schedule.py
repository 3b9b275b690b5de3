"""Linear noise schedule and the closed-form forward noising process.

Step variances rise linearly from beta_min to beta_max over T steps; the
signal-retention product alpha_bar(t) is the running product of (1 - beta).
The forward process is x_t = sqrt(alpha_bar_t) x_0 + sqrt(1 - alpha_bar_t) eps,
so sqrt(alpha_bar)^2 + (1 - alpha_bar) = 1 holds identically.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DEFAULT_T = 1000
DEFAULT_BETA_MIN = 1e-4
DEFAULT_BETA_MAX = 2e-2


@dataclass(frozen=True)
class NoiseSchedule:
    betas: np.ndarray  # index i corresponds to step t = i + 1
    alpha_bars: np.ndarray

    @property
    def t_max(self) -> int:
        return len(self.betas)

    def beta(self, t: int) -> float:
        self._check_t(t)
        return float(self.betas[t - 1])

    def alpha_bar(self, t: int) -> float:
        self._check_t(t)
        return float(self.alpha_bars[t - 1])

    def _check_t(self, t) -> None:
        if not 1 <= t <= self.t_max:
            raise ValueError(f"step t must be in [1, {self.t_max}], got {t}")

    def signal_noise_coeffs(self, t) -> tuple[np.ndarray, np.ndarray]:
        """(sqrt(alpha_bar_t), sqrt(1 - alpha_bar_t)) for scalar or array t."""
        t = np.asarray(t)
        if np.any(t < 1) or np.any(t > self.t_max):
            raise ValueError(f"step t must be in [1, {self.t_max}]")
        ab = self.alpha_bars[t - 1]
        return np.sqrt(ab), np.sqrt(1.0 - ab)

    def to_dict(self) -> dict:
        return {
            "t_max": self.t_max,
            "beta_min": float(self.betas[0]),
            "beta_max": float(self.betas[-1]),
        }


def build_schedule(
    t_max: int = DEFAULT_T,
    beta_min: float = DEFAULT_BETA_MIN,
    beta_max: float = DEFAULT_BETA_MAX,
) -> NoiseSchedule:
    """Linear beta schedule with running-product alpha_bar."""
    if t_max < 2:
        raise ValueError(f"t_max must be >= 2, got {t_max}")
    if not 0 < beta_min < beta_max < 1:
        raise ValueError(f"require 0 < beta_min < beta_max < 1, got ({beta_min}, {beta_max})")
    betas = np.linspace(beta_min, beta_max, t_max)
    alpha_bars = np.cumprod(1.0 - betas)
    schedule = NoiseSchedule(betas=betas, alpha_bars=alpha_bars)
    assert np.all(np.diff(betas) > 0)
    assert np.all(np.diff(alpha_bars) < 0)
    assert np.all((alpha_bars > 0) & (alpha_bars < 1))
    return schedule


def forward_noise(x0: np.ndarray, t, schedule: NoiseSchedule, eps: np.ndarray) -> np.ndarray:
    """Closed-form forward process given the noise draw.

    Supports a single vector with scalar t, or a batch (n, d) with per-row t.
    """
    x0 = np.asarray(x0, dtype=float)
    eps = np.asarray(eps, dtype=float)
    if eps.shape != x0.shape:
        raise ValueError(f"noise shape {eps.shape} must match x0 shape {x0.shape}")
    if not np.all(np.isfinite(x0)):
        raise ValueError("x0 must be finite")
    s, n = schedule.signal_noise_coeffs(t)
    if x0.ndim == 2 and np.ndim(t) == 1:
        s, n = s[:, None], n[:, None]
    return s * x0 + n * eps
