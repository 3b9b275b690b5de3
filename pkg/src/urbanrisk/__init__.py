"""Hazard-conditioned urban accessibility engine and counterfactual scenario simulator.

Subpackages:
    data        building records, synthetic city generation, dedup, normalization
    network     road network layers, hazard conditioning, accessibility signals
    scenario    intervention prompts, deterministic feature edits, counterfactual runs
    encode      modality fusion, spatial cluster tokens, prompt embeddings
    forecast    denoising diffusion forecaster (schedule, denoiser, DDIM, training)
    evaluation  split manifests with leakage controls, metric suite
    service     risk-layer publication and the scenario HTTP endpoint
"""

__version__ = "0.1.0"
