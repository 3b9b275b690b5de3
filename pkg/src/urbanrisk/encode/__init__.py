"""Modality embeddings, cross-modal fusion, spatial cluster tokens, prompt encoding."""

from urbanrisk.encode.fusion import (
    CrossAttention,
    FusionStack,
    ModalityEmbedding,
    RepresentationConfig,
    modality_dropout,
)
from urbanrisk.encode.tokens import ClusterToken, cluster_tokens, kmeans, sinusoidal_pe
from urbanrisk.encode.prompt import (
    PROMPT_ENUMS,
    PROMPT_NUMERIC_FIELDS,
    PromptEmbedding,
    PromptEncoder,
    intervention_embedding,
)

__all__ = [
    "RepresentationConfig",
    "ModalityEmbedding",
    "CrossAttention",
    "FusionStack",
    "modality_dropout",
    "ClusterToken",
    "kmeans",
    "sinusoidal_pe",
    "cluster_tokens",
    "PROMPT_ENUMS",
    "PROMPT_NUMERIC_FIELDS",
    "PromptEmbedding",
    "PromptEncoder",
    "intervention_embedding",
]
