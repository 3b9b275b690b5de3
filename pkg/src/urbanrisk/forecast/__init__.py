"""Denoising diffusion forecaster at desk scale."""

from urbanrisk.forecast.schedule import NoiseSchedule, build_schedule, forward_noise
from urbanrisk.forecast.denoiser import Denoiser
from urbanrisk.forecast.losses import LossWeights, combined_loss, diffusion_loss
from urbanrisk.forecast.sampling import SampleSet, ddim_sample, ensemble_sample
from urbanrisk.forecast.training import TrainConfig, TrainHistory, train

__all__ = [
    "NoiseSchedule",
    "build_schedule",
    "forward_noise",
    "Denoiser",
    "LossWeights",
    "diffusion_loss",
    "combined_loss",
    "SampleSet",
    "ddim_sample",
    "ensemble_sample",
    "TrainConfig",
    "TrainHistory",
    "train",
]
