from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from urbanrisk.scenario.prompts import (
    DELTA_RANGES,
    InterventionKind,
    InterventionPrompt,
    TargetSelector,
    damage_multiplier,
    flood_multiplier,
    road_multiplier,
)


class TestClosedForms:
    def test_flood_multiplier_values(self):
        assert flood_multiplier(0.0) == 1.0
        # exactly the closed form; 0.82 holds at working precision
        assert flood_multiplier(0.3) == 1.0 - 0.6 * 0.3
        assert flood_multiplier(0.3) == pytest.approx(0.82, abs=1e-15)
        assert flood_multiplier(0.15) == pytest.approx(0.91, abs=1e-15)

    def test_damage_multiplier_values(self):
        assert damage_multiplier(0.0) == 1.0
        assert damage_multiplier(15.0) == math.exp(-0.3)
        assert damage_multiplier(5.0) == math.exp(-0.1)

    def test_road_multiplier_values(self):
        assert road_multiplier(0.0) == 1.0
        assert road_multiplier(0.5) == 0.75
        assert road_multiplier(0.2) == pytest.approx(0.90, abs=1e-15)

    def test_out_of_range_rejected_never_clamped(self):
        with pytest.raises(ValueError):
            flood_multiplier(0.31)
        with pytest.raises(ValueError):
            flood_multiplier(-0.01)
        with pytest.raises(ValueError):
            damage_multiplier(15.2)
        with pytest.raises(ValueError):
            road_multiplier(0.6)

    def test_thousand_random_deltas_exact(self):
        rng = np.random.default_rng(42)
        for _ in range(1000):
            d_drain = float(rng.uniform(0, 0.3))
            d_str = float(rng.uniform(0, 15))
            d_cap = float(rng.uniform(0, 0.5))
            assert flood_multiplier(d_drain) == 1.0 - 0.6 * d_drain
            assert damage_multiplier(d_str) == math.exp(-0.02 * d_str)
            assert road_multiplier(d_cap) == 1.0 - 0.5 * d_cap

    @settings(max_examples=200, deadline=None)
    @given(
        st.floats(min_value=0, max_value=0.3),
        st.floats(min_value=0, max_value=0.5),
    )
    def test_monotonicity(self, d1, d2):
        lo, hi = sorted([d1 * 0.6, d1])
        assert flood_multiplier(hi * 0.5) <= flood_multiplier(lo * 0.5) or hi == lo
        lo_c, hi_c = sorted([d2 * 0.5, d2])
        assert road_multiplier(hi_c) <= road_multiplier(lo_c)


class TestPromptValidation:
    def test_kind_restricts_nonzero_deltas(self):
        with pytest.raises(ValueError, match="may only set"):
            InterventionPrompt(
                kind=InterventionKind.BUILDING_RETROFIT,
                deltas={"drainage_gain": 0.1},
            )

    def test_unknown_delta_rejected(self):
        with pytest.raises(ValueError, match="unknown delta"):
            InterventionPrompt(
                kind=InterventionKind.GREEN_INFRASTRUCTURE, deltas={"nope": 0.1}
            )

    def test_out_of_range_delta_rejected(self):
        with pytest.raises(ValueError, match="structural_points"):
            InterventionPrompt(
                kind=InterventionKind.BUILDING_RETROFIT, deltas={"structural_points": 15.5}
            )

    def test_identity_detection(self):
        p = InterventionPrompt(kind=InterventionKind.GREEN_INFRASTRUCTURE)
        assert p.is_identity

    def test_round_trip_json(self):
        p = InterventionPrompt(
            kind=InterventionKind.GREEN_INFRASTRUCTURE,
            deltas={"drainage_gain": 0.2, "imperviousness_reduction": 0.1},
            selector=TargetSelector(ids=("b1", "b2")),
            label="swales downtown",
        )
        q = InterventionPrompt.from_dict(p.to_dict())
        assert q.to_dict() == p.to_dict()
        assert q.prompt_id == p.prompt_id

    def test_bad_kind_in_dict(self):
        with pytest.raises(ValueError, match="kind"):
            InterventionPrompt.from_dict({"kind": "terraform"})

    def test_scaled_clamps_to_ranges(self):
        p = InterventionPrompt(
            kind=InterventionKind.TRANSPORTATION_UPGRADE, deltas={"capacity_gain": 0.4}
        )
        up = p.scaled(1.5)
        assert up.deltas["capacity_gain"] == 0.5  # clamped at the range top
        down = p.scaled(0.5)
        assert down.deltas["capacity_gain"] == pytest.approx(0.2)

    def test_delta_ranges_match_documented_bounds(self):
        assert DELTA_RANGES["imperviousness_reduction"] == (0.0, 0.2)
        assert DELTA_RANGES["drainage_gain"] == (0.0, 0.3)
        assert DELTA_RANGES["structural_points"] == (0.0, 15.0)
        assert DELTA_RANGES["capacity_gain"] == (0.0, 0.5)
