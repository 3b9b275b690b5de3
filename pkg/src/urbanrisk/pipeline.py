"""End-to-end forecaster: representation stack + diffusion model + stats.

The forecaster owns everything needed to go from raw building records and a
conditioned network to calibrated target samples: train-partition
normalization, the seeded fusion/prompt stand-ins, per-node graph summaries,
and the trained denoiser. Checkpoints persist the denoiser parameters and
the seeds/configs needed to rebuild the deterministic parts bit-for-bit.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from typing import Mapping, Sequence

import numpy as np

from urbanrisk.data.normalize import NormalizationStats, fit_normalization
from urbanrisk.data.records import FEATURE_SCHEMA, TARGET_FIELDS, BuildingRecord
from urbanrisk.encode.fusion import FusionStack, RepresentationConfig, modality_dropout
from urbanrisk.encode.prompt import (
    INTERVENTION_EMBED_DIM,
    PromptEncoder,
    intervention_embedding,
)
from urbanrisk.errors import NotTrainedError
from urbanrisk.evaluation.splits import SplitManifest, audit_prompt_fields
from urbanrisk.forecast.denoiser import Denoiser
from urbanrisk.forecast.losses import LossWeights
from urbanrisk.forecast.sampling import SampleSet, ddim_sample_batch
from urbanrisk.forecast.schedule import NoiseSchedule, build_schedule
from urbanrisk.forecast.training import TrainConfig, TrainHistory, train
from urbanrisk.network.model import ConditionedNetwork, ServicePoints
from urbanrisk.network.shortest import _dijkstra
from urbanrisk.scenario.prompts import InterventionPrompt

CHECKPOINT_SCHEMA_VERSION = 1

GRAPH_SUMMARY_DIM = 7
_TIME_SCALE_S = 900.0
_TIME_CAP = 4.0  # unreachable nodes summarize as 4 x the budget


@dataclass(frozen=True)
class ForecasterConfig:
    hidden_dim: int = 96
    n_blocks: int = 2
    t_embed_dim: int = 16
    t_max: int = 1000
    beta_min: float = 1e-4
    beta_max: float = 2e-2
    ddim_steps: int = 50
    ensemble_n: int = 100
    horizons: tuple[int, ...] = (1,)
    modality_dropout_rate: float = 0.1
    intervention_augment_prob: float = 0.5
    rep_preset: str = "small"  # "small" | "full"
    seed: int = 0

    def rep_config(self) -> RepresentationConfig:
        if self.rep_preset == "full":
            return RepresentationConfig()
        if self.rep_preset == "small":
            return RepresentationConfig.small()
        raise ValueError(f"unknown representation preset {self.rep_preset!r}")

    @classmethod
    def full_scale(cls, **overrides) -> "ForecasterConfig":
        """Documented full-scale preset: paper-default representation dims
        (fused 1280, prompt 1024), a 24-block/1024-wide denoiser, 100-sample
        ensembles. Not the test default; desk-scale runs use the small preset.
        """
        base = dict(
            hidden_dim=1024,
            n_blocks=24,
            rep_preset="full",
            ensemble_n=100,
            ddim_steps=50,
        )
        base.update(overrides)
        return cls(**base)


def building_key(record: BuildingRecord) -> str:
    """Identity of a building across years.

    Record ids of the form "<building>-<year>" (the JSONL convention) strip
    the year suffix; anything else is treated as a single-year building.
    """
    head, sep, tail = record.id.rpartition("-")
    if sep and tail == str(record.year):
        return head
    return record.id


class GraphSummaryProvider:
    """Fixed per-node summary statistics of a conditioned network.

    Channels: out/in degree over retained edges, travel time to the nearest
    emergency facility and shelter (scaled by the 15-minute budget, capped
    when unreachable), and the network-wide quartiles of facility time.
    """

    def __init__(self, cn: ConditionedNetwork, service: ServicePoints):
        self.cn = cn
        fac_t = self._min_times(service.emergency_nodes)
        shel_t = self._min_times(service.shelter_nodes)
        finite = [v for v in fac_t.values() if math.isfinite(v)]
        if finite:
            q25, q50, q75 = np.percentile(finite, [25, 50, 75]) / _TIME_SCALE_S
        else:
            q25 = q50 = q75 = _TIME_CAP
        self._global = np.array([q25, q50, q75])
        self._fac_t, self._shel_t = fac_t, shel_t

    def _min_times(self, targets: set[str]) -> dict[str, float]:
        best = {nid: math.inf for nid in self.cn.base.nodes}
        for t in sorted(targets):
            for nid, d in _dijkstra(self.cn, t, reverse=True).items():
                if d < best[nid]:
                    best[nid] = d
        return best

    def _scaled_time(self, value: float) -> float:
        return min(value / _TIME_SCALE_S, _TIME_CAP)

    def vector(self, node_id: str) -> np.ndarray:
        out_deg = len(self.cn.retained_out_edges(node_id))
        in_deg = len(self.cn.retained_in_edges(node_id))
        return np.concatenate(
            [
                [out_deg / 4.0, in_deg / 4.0],
                [self._scaled_time(self._fac_t[node_id])],
                [self._scaled_time(self._shel_t[node_id])],
                self._global,
            ]
        )


class GraphProviderMap:
    """Per-city graph summaries for multi-city (zero-shot) training.

    Records condition on their own city's network; a record from a city
    without a provider gets the zero summary vector.
    """

    def __init__(self, providers: Mapping[str, GraphSummaryProvider]):
        self.providers = dict(providers)

    def for_record(self, record: BuildingRecord) -> GraphSummaryProvider | None:
        return self.providers.get(record.city_id)


class Forecaster:
    def __init__(self, config: ForecasterConfig | None = None):
        self.config = config or ForecasterConfig()
        rep = self.config.rep_config()
        group_dims = {g: len(d) for g, d in FEATURE_SCHEMA.items()}
        self.fusion = FusionStack(rep, seed=self.config.seed, group_dims=group_dims)
        self.prompt_encoder = PromptEncoder(out_dim=rep.prompt_dim, seed=self.config.seed + 1)
        self.schedule: NoiseSchedule = build_schedule(
            self.config.t_max, self.config.beta_min, self.config.beta_max
        )
        self.cond_dim = (
            rep.fused_dim + GRAPH_SUMMARY_DIM + rep.prompt_dim + INTERVENTION_EMBED_DIM
        )
        self.denoiser = Denoiser.create(
            target_dim=len(TARGET_FIELDS),
            cond_dim=self.cond_dim,
            hidden_dim=self.config.hidden_dim,
            n_blocks=self.config.n_blocks,
            t_embed_dim=self.config.t_embed_dim,
            seed=self.config.seed + 2,
        )
        self.stats: NormalizationStats | None = None
        self.history: TrainHistory | None = None

    # -- conditioning -------------------------------------------------------

    def _template_prompt(self, horizon: int) -> np.ndarray:
        return self.prompt_encoder.encode(
            None, None, {"forecast_horizon_years": horizon, "climate_scenario": "RCP4.5"}
        ).vector

    def conditioning(
        self,
        record: BuildingRecord,
        graphs: "GraphSummaryProvider | GraphProviderMap",
        horizon: int,
        prompt: InterventionPrompt | None = None,
        dropout_rate: float = 0.0,
        dropout_seed: int = 0,
        manifest: SplitManifest | None = None,
    ) -> np.ndarray:
        if self.stats is None:
            raise NotTrainedError("normalization statistics not fitted")
        if manifest is not None:
            audit_prompt_fields(manifest, record.city_id, None)
        normalized = self.stats.transform_features(record)
        me = self.fusion.embed(normalized)
        if dropout_rate > 0:
            me = modality_dropout(me, dropout_rate, seed=dropout_seed)
        fused = self.fusion.fuse(me)
        provider = graphs.for_record(record) if isinstance(graphs, GraphProviderMap) else graphs
        node = record.node_attachment
        graph_vec = (
            provider.vector(node)
            if provider is not None and node is not None and node in provider.cn.base
            else np.zeros(GRAPH_SUMMARY_DIM)
        )
        return np.concatenate(
            [fused, graph_vec, self._template_prompt(horizon), intervention_embedding(prompt)]
        )

    # -- training -----------------------------------------------------------

    def build_pairs(
        self,
        records: Sequence[BuildingRecord],
        assignments: Mapping[str, str],
        partition: str,
    ) -> list[tuple[BuildingRecord, BuildingRecord, int]]:
        """(features-at-t, targets-at-t+h, h) pairs whose target record lies in
        the given partition."""
        by_building: dict[str, dict[int, BuildingRecord]] = {}
        for r in records:
            by_building.setdefault(building_key(r), {})[r.year] = r
        pairs = []
        for years in by_building.values():
            for year, rec in sorted(years.items()):
                for h in self.config.horizons:
                    future = years.get(year + h)
                    if future is None or future.targets is None:
                        continue
                    if assignments.get(future.id) == partition:
                        pairs.append((rec, future, h))
        return pairs

    def fit(
        self,
        records: Sequence[BuildingRecord],
        manifest: SplitManifest,
        graphs: "GraphSummaryProvider | GraphProviderMap",
        train_config: TrainConfig | None = None,
        weights: LossWeights = LossWeights(),
    ) -> TrainHistory:
        self.stats = fit_normalization(records, manifest.assignments)
        pairs = self.build_pairs(records, manifest.assignments, "train")
        if not pairs:
            raise ValueError("no training pairs: check manifest and horizons")

        rng = np.random.default_rng(self.config.seed + 3)
        x0 = np.stack([self.stats.encode_targets(fut.targets.as_array()) for _, fut, _ in pairs])
        cond = np.stack(
            [
                self.conditioning(
                    rec,
                    graphs,
                    h,
                    prompt=None,
                    dropout_rate=self.config.modality_dropout_rate,
                    dropout_seed=int(rng.integers(2**31)),
                )
                for rec, _, h in pairs
            ]
        )
        # Teach the intervention channels by sampling random descriptors;
        # targets do not depend on them, so their learned influence goes to
        # zero instead of staying at random initialization.
        n_aug = len(cond)
        aug_mask = rng.uniform(size=n_aug) < self.config.intervention_augment_prob
        kind_idx = rng.integers(0, 3, size=n_aug)
        aug = np.zeros((n_aug, INTERVENTION_EMBED_DIM))
        aug[np.arange(n_aug), kind_idx] = 1.0
        aug[:, 3:] = rng.uniform(size=(n_aug, INTERVENTION_EMBED_DIM - 3))
        cond[aug_mask, -INTERVENTION_EMBED_DIM:] = aug[aug_mask]

        cfg = train_config or TrainConfig(seed=self.config.seed + 4)
        self.history = train(x0, cond, self.denoiser, self.schedule, weights, cfg)
        return self.history

    # -- sampling -----------------------------------------------------------

    def _sample_matrix(
        self, conds: np.ndarray, n: int, steps: int, seed: int
    ) -> np.ndarray:
        """(n_records, n_samples, target_dim) in normalized space."""
        n_rec = len(conds)
        rows = np.repeat(conds, n, axis=0)
        seeds = np.arange(seed, seed + n_rec * n)
        flat = ddim_sample_batch(
            self.denoiser, self.schedule, rows, steps=steps, seeds=seeds
        )
        return flat.reshape(n_rec, n, -1)

    def predict(
        self,
        records: Sequence[BuildingRecord],
        graphs: "GraphSummaryProvider | GraphProviderMap",
        horizon: int | None = None,
        prompt: InterventionPrompt | None = None,
        n: int | None = None,
        seed: int = 0,
    ) -> list[SampleSet]:
        """Ensemble forecasts per record, denormalized to physical units."""
        if self.stats is None or not self.denoiser.trained:
            raise NotTrainedError("forecaster must be fitted before predicting")
        horizon = horizon or self.config.horizons[0]
        n = n or self.config.ensemble_n
        conds = np.stack(
            [self.conditioning(r, graphs, horizon, prompt=prompt) for r in records]
        )
        raw = self._sample_matrix(conds, n, self.config.ddim_steps, seed)
        out = []
        for i in range(len(records)):
            decoded = self.stats.decode_targets(raw[i])
            out.append(SampleSet.from_samples(decoded))
        return out

    def predict_mean(self, sample_sets: Sequence[SampleSet], target: str) -> np.ndarray:
        k = TARGET_FIELDS.index(target)
        return np.array([s.mean[k] for s in sample_sets])

    # -- persistence ---------------------------------------------------------

    def save(self, path) -> None:
        meta = {
            "schema_version": CHECKPOINT_SCHEMA_VERSION,
            "config": asdict(self.config),
            "denoiser": self.denoiser.meta(),
            "schedule": self.schedule.to_dict(),
            "stats": self.stats.to_dict() if self.stats else None,
        }
        arrays = {f"dn.{k}": v for k, v in self.denoiser.params.items()}
        np.savez(path, meta=json.dumps(meta, sort_keys=True), **arrays)

    @classmethod
    def load(cls, path) -> "Forecaster":
        with np.load(path, allow_pickle=False) as bundle:
            meta = json.loads(str(bundle["meta"]))
            if meta["schema_version"] != CHECKPOINT_SCHEMA_VERSION:
                raise ValueError(
                    f"checkpoint schema {meta['schema_version']} unsupported "
                    f"(expected {CHECKPOINT_SCHEMA_VERSION})"
                )
            cfg_dict = dict(meta["config"])
            cfg_dict["horizons"] = tuple(cfg_dict["horizons"])
            fc = cls(ForecasterConfig(**cfg_dict))
            params = {
                k[len("dn.") :]: bundle[k] for k in bundle.files if k.startswith("dn.")
            }
        fc.denoiser = Denoiser.from_meta(meta["denoiser"], params)
        if meta["stats"] is not None:
            fc.stats = NormalizationStats.from_dict(meta["stats"])
        return fc
