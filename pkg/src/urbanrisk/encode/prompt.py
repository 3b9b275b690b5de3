"""Deterministic prompt encoding.

The pretrained language encoder is replaced by a seeded lookup scheme with
the same interface: categorical fields select embedding rows, numeric fields
scale direction vectors, rows are summed per level, and each level projects
into its own block of the output vector. Block-diagonal projection gives
structural isolation: changing a Level 3 field can only change Level 3's
channels.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from urbanrisk.scenario.prompts import DELTA_RANGES, InterventionKind, InterventionPrompt

PROMPT_ENUMS: dict[str, dict[str, tuple[str, ...]]] = {
    "level1": {
        "flood_intensity": ("low", "medium", "high"),
        "flood_duration": ("flash", "sustained"),
        "flood_source": ("coastal", "riverine", "pluvial"),
        "heat_magnitude": ("moderate", "severe", "extreme"),
        "heat_duration": ("days", "weeks"),
        "structural_age_cohort": ("pre-1950", "1950-1990", "post-1990"),
        "structural_materials": ("masonry", "concrete", "wood"),
    },
    "level2": {},
    "level3": {
        "climate_scenario": ("RCP4.5", "RCP8.5"),
    },
}

# Numeric fields carry (validation range, scale divisor).
PROMPT_NUMERIC_FIELDS: dict[str, dict[str, tuple[tuple[float, float], float]]] = {
    "level1": {
        "urban_heat_island": ((0.0, 1.0), 1.0),
    },
    "level2": {
        "income_quintile": ((1.0, 5.0), 5.0),
        "population_density": ((0.0, 1e6), 1e4),
        "homeownership_rate": ((0.0, 1.0), 1.0),
        "emergency_service_access": ((0.0, 1.0), 1.0),
        "evacuation_route_access": ((0.0, 1.0), 1.0),
        "transit_access": ((0.0, 1.0), 1.0),
        "hospital_access": ((0.0, 1.0), 1.0),
        "shelter_access": ((0.0, 1.0), 1.0),
    },
    "level3": {
        "forecast_horizon_years": ((1.0, 10.0), 10.0),
        "winter_precipitation_mm": ((0.0, 5000.0), 1000.0),
        "summer_heat_wave_days": ((0.0, 120.0), 30.0),
    },
}

LEVELS = ("level1", "level2", "level3")


@dataclass(frozen=True)
class PromptEmbedding:
    vector: np.ndarray
    fields: dict


class PromptEncoder:
    """Seeded lookup tables per field plus block-diagonal level projections."""

    def __init__(self, out_dim: int, seed: int, level_dim: int = 32):
        self.out_dim = out_dim
        self.level_dim = level_dim
        rng = np.random.default_rng(seed)
        self.tables: dict[str, dict[str, np.ndarray]] = {}
        for level in LEVELS:
            for name, values in PROMPT_ENUMS[level].items():
                self.tables[f"{level}.{name}"] = {
                    v: rng.normal(0, 1, size=level_dim) for v in values
                }
            for name in PROMPT_NUMERIC_FIELDS[level]:
                self.tables[f"{level}.{name}"] = {
                    "__direction__": rng.normal(0, 1, size=level_dim)
                }
        # Output blocks: one slice of out_dim per level.
        base = out_dim // 3
        self.block_sizes = (out_dim - 2 * base, base, base)
        self.projections = [
            rng.normal(0, 1 / np.sqrt(level_dim), size=(size, level_dim))
            for size in self.block_sizes
        ]

    def _level_vector(self, level: str, fields: Mapping | None) -> np.ndarray:
        acc = np.zeros(self.level_dim)
        if fields is None:
            return acc
        enums = PROMPT_ENUMS[level]
        numerics = PROMPT_NUMERIC_FIELDS[level]
        for name, value in fields.items():
            if name in enums:
                table = self.tables[f"{level}.{name}"]
                if value not in table:
                    raise ValueError(
                        f"{level}.{name}: unknown value {value!r}; valid: {sorted(table)}"
                    )
                acc = acc + table[value]
            elif name in numerics:
                (lo, hi), scale = numerics[name]
                v = float(value)
                if not lo <= v <= hi:
                    raise ValueError(f"{level}.{name} must be in [{lo}, {hi}], got {v}")
                acc = acc + (v / scale) * self.tables[f"{level}.{name}"]["__direction__"]
            else:
                known = sorted(list(enums) + list(numerics))
                raise ValueError(f"{level}: unknown field {name!r}; valid: {known}")
        return acc

    def encode(
        self,
        level1: Mapping | None = None,
        level2: Mapping | None = None,
        level3: Mapping | None = None,
    ) -> PromptEmbedding:
        blocks = []
        for proj, level, fields in zip(self.projections, LEVELS, (level1, level2, level3)):
            blocks.append(proj @ self._level_vector(level, fields))
        vector = np.concatenate(blocks)
        return PromptEmbedding(
            vector=vector,
            fields={
                "level1": dict(level1 or {}),
                "level2": dict(level2 or {}),
                "level3": dict(level3 or {}),
            },
        )

    def block_slices(self) -> list[slice]:
        bounds = np.cumsum((0,) + self.block_sizes)
        return [slice(int(a), int(b)) for a, b in zip(bounds, bounds[1:])]


def intervention_embedding(prompt: InterventionPrompt | None) -> np.ndarray:
    """Compact deterministic embedding of an intervention prompt.

    One-hot over the three kinds followed by each delta normalized to its
    documented range; consumed as extra conditioning channels. None and
    identity prompts (all deltas zero) both canonicalize to the zero vector,
    so a do-nothing intervention conditions exactly like no intervention.
    """
    if prompt is None or prompt.is_identity:
        return np.zeros(INTERVENTION_EMBED_DIM)
    kinds = list(InterventionKind)
    one_hot = np.zeros(len(kinds))
    one_hot[kinds.index(prompt.kind)] = 1.0
    deltas = np.array(
        [prompt.deltas[name] / DELTA_RANGES[name][1] for name in sorted(DELTA_RANGES)]
    )
    return np.concatenate([one_hot, deltas])


INTERVENTION_EMBED_DIM = len(InterventionKind) + len(DELTA_RANGES)
