/**
 * Wire types mirroring the server's JSON schemas.
 *
 * The UI never computes risk or accessibility numbers; these types describe
 * what arrives from the service and is rendered verbatim.
 */

export type InterventionKind =
  | 'green_infrastructure'
  | 'building_retrofit'
  | 'transportation_upgrade';

export type DeltaName =
  | 'imperviousness_reduction'
  | 'drainage_gain'
  | 'structural_points'
  | 'capacity_gain';

export interface Selector {
  all: boolean;
  ids: string[];
}

export interface PromptDraft {
  kind: InterventionKind;
  deltas: Partial<Record<DeltaName, number>>;
  selector: Selector;
  label: string;
}

export interface ScenarioOptions {
  n_samples: number;
  sensitivity: boolean;
  seed: number;
  max_buildings: number;
  tau_s?: number;
}

export interface ScenarioRequest {
  schema_version: number;
  request_id: string;
  prompt: PromptDraft;
  hazard_scenario_id?: string | null;
  options: ScenarioOptions;
}

export interface EdgeFeatureProperties {
  edge_id: string;
  scenario_id: string;
  generated_at: string;
  multiplier?: number;
  removed?: boolean;
}

export interface EdgeFeature {
  type: 'Feature';
  geometry: { type: 'LineString'; coordinates: [number, number][] };
  properties: EdgeFeatureProperties;
}

export interface WeightLayer {
  type: 'FeatureCollection';
  schema_version: number;
  features: EdgeFeature[];
}

export interface ZoneSummary {
  reachability_rate: number;
  mean_travel_time_s: number | null;
  mean_redundancy: number;
  n_buildings: number;
}

export interface RiskLayer {
  schema_version: number;
  version: number;
  generated_at: string;
  cadence_s: number;
  weight_layer: WeightLayer;
  zone_summaries: Record<string, ZoneSummary>;
  checksum: string;
}

export interface AccessibilityBlock {
  reachability_rate: number | null;
  mean_travel_time_s: number | null;
  mean_redundancy: number | null;
  n_scenarios?: number;
}

export interface TargetDelta {
  mean: number;
  ci_low: number;
  ci_high: number;
}

export interface ScenarioVariant {
  factor: number;
  prompt: PromptDraft;
  risk_delta: Record<string, Record<string, TargetDelta>>;
  accessibility: {
    baseline: AccessibilityBlock;
    scenario: AccessibilityBlock;
    delta: AccessibilityBlock;
  };
  mean_risk_delta: Record<string, number>;
}

export interface ScenarioResult {
  prompt: PromptDraft;
  prompt_id: string;
  scenario_ids: string[];
  seed: number;
  n_samples: number;
  variants: ScenarioVariant[];
  weight_layer: WeightLayer;
  warnings: string[];
}

export interface ScenarioResponse {
  schema_version: number;
  request_id: string;
  layer_version: number;
  result: ScenarioResult;
  layer_deltas: Record<
    string,
    {
      before: { multiplier: number | null; removed: boolean };
      after: { multiplier: number | null; removed: boolean };
    }
  >;
}

export interface EdgeQueryResponse {
  schema_version: number;
  layer_version: number;
  edges: Record<string, { multiplier?: number; removed?: boolean; not_found?: boolean }>;
}

export interface HealthResponse {
  schema_version: number;
  status: string;
  layer_version: number;
  forecaster_loaded: boolean;
}
