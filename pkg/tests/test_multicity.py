"""Zero-shot workflow: train on one city, predict an unseen one."""

from __future__ import annotations

import numpy as np
import pytest

from urbanrisk.data.synth import SynthConfig, synthesize_city
from urbanrisk.evaluation.splits import audit_prompt_fields, unseen_city_split
from urbanrisk.forecast.training import TrainConfig
from urbanrisk.network.condition import condition_network
from urbanrisk.network.model import HazardScenario
from urbanrisk.pipeline import (
    Forecaster,
    ForecasterConfig,
    GraphProviderMap,
    GraphSummaryProvider,
)


@pytest.fixture(scope="module")
def two_cities():
    coastal = synthesize_city(
        SynthConfig(city_id="coastal", n_buildings=120, n_years=15, grid_side=6), seed=21
    )
    inland = synthesize_city(
        SynthConfig(
            city_id="inland",
            n_buildings=80,
            n_years=15,
            grid_side=6,
            origin_lat=40.4,
            origin_lon=49.8,
        ),
        seed=22,
    )
    return coastal, inland


def _providers(*results) -> GraphProviderMap:
    return GraphProviderMap(
        {
            r.dataset.city_id: GraphSummaryProvider(
                condition_network(r.network, HazardScenario(scenario_id="free-flow")),
                r.service_points,
            )
            for r in results
        }
    )


class TestUnseenCityWorkflow:
    def test_train_on_one_city_predict_the_other(self, two_cities):
        coastal, inland = two_cities
        records = coastal.dataset.buildings + inland.dataset.buildings
        manifest = unseen_city_split(records, held_out_city="inland")
        graphs = _providers(coastal, inland)

        fc = Forecaster(ForecasterConfig(seed=5))
        fc.fit(
            records,
            manifest,
            graphs,
            TrainConfig(epochs=12, batch_size=128, learning_rate=2e-3, seed=2),
        )

        held_out = inland.dataset.buildings[:40]
        sets_ = fc.predict(held_out, graphs, horizon=1, n=12, seed=3)
        assert len(sets_) == 40
        pred = fc.predict_mean(sets_, "flood_depth")
        assert np.all(np.isfinite(pred))
        # transferred signal: predictions track the held-out city's planted
        # elevation gradient (negative correlation), even without its labels
        elev = np.array([b.elevation for b in held_out])
        r = np.corrcoef(elev, pred)[0, 1]
        assert r < -0.1, f"no transferred elevation signal (r={r:.2f})"

    def test_training_pairs_exclude_held_out_city(self, two_cities):
        coastal, inland = two_cities
        records = coastal.dataset.buildings + inland.dataset.buildings
        manifest = unseen_city_split(records, held_out_city="inland")
        fc = Forecaster(ForecasterConfig(seed=5))
        pairs = fc.build_pairs(records, manifest.assignments, "train")
        cities = {rec.city_id for rec, _, _ in pairs}
        assert cities == {"coastal"}

    def test_prompt_audit_guards_held_out_level1(self, two_cities):
        coastal, inland = two_cities
        records = coastal.dataset.buildings + inland.dataset.buildings
        manifest = unseen_city_split(records, held_out_city="inland")
        with pytest.raises(ValueError, match="event-label"):
            audit_prompt_fields(manifest, "inland", {"flood_intensity": "high"})

    def test_record_without_provider_gets_zero_graph_block(self, two_cities):
        coastal, inland = two_cities
        records = coastal.dataset.buildings + inland.dataset.buildings
        manifest = unseen_city_split(records, held_out_city="inland")
        only_coastal = _providers(coastal)
        fc = Forecaster(ForecasterConfig(seed=5))
        fc.fit(
            records,
            manifest,
            only_coastal,
            TrainConfig(epochs=2, batch_size=128, learning_rate=2e-3, seed=2),
        )
        cond = fc.conditioning(inland.dataset.buildings[0], only_coastal, horizon=1)
        rep = fc.config.rep_config()
        graph_block = cond[rep.fused_dim : rep.fused_dim + 7]
        assert not graph_block.any()
