"""Intervention prompts and their closed-form exposure multipliers.

Each intervention kind owns a subset of the edit deltas; the others must stay
zero. Out-of-range deltas raise, they are never clamped silently (sensitivity
scaling is the one documented exception and clamps to the legal range).
"""

from __future__ import annotations

import enum
import hashlib
import json
import math
from dataclasses import dataclass, field, replace
from typing import Mapping, Sequence


class InterventionKind(str, enum.Enum):
    GREEN_INFRASTRUCTURE = "green_infrastructure"
    BUILDING_RETROFIT = "building_retrofit"
    TRANSPORTATION_UPGRADE = "transportation_upgrade"


DELTA_RANGES: dict[str, tuple[float, float]] = {
    "imperviousness_reduction": (0.0, 0.2),
    "drainage_gain": (0.0, 0.3),
    "structural_points": (0.0, 15.0),
    "capacity_gain": (0.0, 0.5),
}

_KIND_DELTAS = {
    InterventionKind.GREEN_INFRASTRUCTURE: ("imperviousness_reduction", "drainage_gain"),
    InterventionKind.BUILDING_RETROFIT: ("structural_points",),
    InterventionKind.TRANSPORTATION_UPGRADE: ("capacity_gain",),
}


def _check_range(name: str, value: float) -> float:
    lo, hi = DELTA_RANGES[name]
    if not (math.isfinite(value) and lo <= value <= hi):
        raise ValueError(f"{name} must lie in [{lo}, {hi}], got {value!r}")
    return float(value)


def flood_multiplier(drainage_gain: float) -> float:
    """Exposure multiplier on flood-depth conditioning: 1 - 0.6 * delta."""
    return 1.0 - 0.6 * _check_range("drainage_gain", drainage_gain)


def damage_multiplier(structural_points: float) -> float:
    """Damage-probability multiplier: exp(-0.02 * delta)."""
    return math.exp(-0.02 * _check_range("structural_points", structural_points))


def road_multiplier(capacity_gain: float) -> float:
    """Scale on hazard-induced weight inflation: 1 - 0.5 * delta."""
    return 1.0 - 0.5 * _check_range("capacity_gain", capacity_gain)


@dataclass(frozen=True)
class TargetSelector:
    """Which buildings or edges an intervention touches.

    ``all=True`` selects everything of the relevant type; otherwise only the
    listed ids. Serializes to plain JSON.
    """

    all: bool = False
    ids: tuple[str, ...] = ()

    def matches(self, item_id: str) -> bool:
        return self.all or item_id in self.ids

    def to_dict(self) -> dict:
        return {"all": self.all, "ids": list(self.ids)}

    @classmethod
    def from_dict(cls, d: Mapping) -> "TargetSelector":
        return cls(all=bool(d.get("all", False)), ids=tuple(d.get("ids", ())))


@dataclass(frozen=True)
class InterventionPrompt:
    kind: InterventionKind
    deltas: Mapping[str, float] = field(default_factory=dict)
    selector: TargetSelector = field(default_factory=lambda: TargetSelector(all=True))
    label: str = ""

    def __post_init__(self):
        kind = InterventionKind(self.kind)
        object.__setattr__(self, "kind", kind)
        deltas = {name: 0.0 for name in DELTA_RANGES}
        for name, value in dict(self.deltas).items():
            if name not in DELTA_RANGES:
                raise ValueError(f"unknown delta {name!r}; expected one of {sorted(DELTA_RANGES)}")
            deltas[name] = _check_range(name, value)
        allowed = _KIND_DELTAS[kind]
        offending = [n for n, v in deltas.items() if v != 0.0 and n not in allowed]
        if offending:
            raise ValueError(
                f"{kind.value} may only set {allowed}; got nonzero {offending}"
            )
        object.__setattr__(self, "deltas", deltas)

    @property
    def prompt_id(self) -> str:
        digest = hashlib.sha1(
            json.dumps(self.to_dict(), sort_keys=True).encode("utf-8")
        ).hexdigest()
        return f"p-{digest[:12]}"

    @property
    def is_identity(self) -> bool:
        return all(v == 0.0 for v in self.deltas.values())

    def scaled(self, factor: float) -> "InterventionPrompt":
        """Sensitivity variant: deltas scaled by factor, clamped to legal ranges."""
        if factor < 0:
            raise ValueError("sensitivity factor must be >= 0")
        scaled = {}
        for name, value in self.deltas.items():
            lo, hi = DELTA_RANGES[name]
            scaled[name] = min(hi, max(lo, value * factor))
        return replace(self, deltas=scaled, label=f"{self.label} (x{factor:g})".strip())

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "deltas": {k: v for k, v in sorted(self.deltas.items())},
            "selector": self.selector.to_dict(),
            "label": self.label,
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "InterventionPrompt":
        try:
            kind = InterventionKind(d["kind"])
        except (KeyError, ValueError):
            raise ValueError(
                f"prompt kind must be one of {[k.value for k in InterventionKind]}"
            )
        return cls(
            kind=kind,
            deltas=d.get("deltas", {}),
            selector=TargetSelector.from_dict(d.get("selector", {"all": True})),
            label=d.get("label", ""),
        )


def sensitivity_factors() -> Sequence[float]:
    """Reported sensitivity ladder around the requested deltas."""
    return (0.5, 1.0, 1.5)
