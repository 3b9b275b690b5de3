"""Wire schemas for the scenario endpoint."""

from __future__ import annotations

from pydantic import BaseModel, Field, field_validator

SCHEMA_VERSION = 1


class SelectorModel(BaseModel):
    all: bool = False
    ids: list[str] = Field(default_factory=list)


class PromptModel(BaseModel):
    kind: str
    deltas: dict[str, float] = Field(default_factory=dict)
    selector: SelectorModel = Field(default_factory=lambda: SelectorModel(all=True))
    label: str = ""

    @field_validator("kind")
    @classmethod
    def _known_kind(cls, v: str) -> str:
        valid = {"green_infrastructure", "building_retrofit", "transportation_upgrade"}
        if v not in valid:
            raise ValueError(f"kind must be one of {sorted(valid)}")
        return v


class ScenarioOptions(BaseModel):
    n_samples: int = Field(default=25, ge=2, le=500)
    sensitivity: bool = True
    seed: int = 0
    max_buildings: int = Field(default=50, ge=1, le=5000)
    tau_s: float = Field(default=900.0, gt=0)


class ScenarioRequest(BaseModel):
    schema_version: int = SCHEMA_VERSION
    request_id: str
    prompt: PromptModel
    hazard_scenario_id: str | None = None  # None: the full generated ensemble
    options: ScenarioOptions = Field(default_factory=ScenarioOptions)


class ScenarioResponse(BaseModel):
    schema_version: int = SCHEMA_VERSION
    request_id: str
    layer_version: int
    result: dict
    layer_deltas: dict
