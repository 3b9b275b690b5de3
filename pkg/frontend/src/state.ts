/**
 * Session view state: the prompt draft, scenario history, and comparison
 * selection. History entries are frozen on arrival and only ever appended;
 * exporting yields replayable ScenarioRequest JSON.
 */

import { allowedDeltas, clampToRange } from './sliders.js';
import type {
  DeltaName,
  InterventionKind,
  PromptDraft,
  ScenarioRequest,
  ScenarioResponse,
} from './types.js';

export interface HistoryEntry {
  readonly id: number;
  readonly request: ScenarioRequest;
  readonly response: ScenarioResponse;
}

export function emptyDraft(kind: InterventionKind = 'green_infrastructure'): PromptDraft {
  return { kind, deltas: {}, selector: { all: true, ids: [] }, label: '' };
}

export class ViewState {
  draft: PromptDraft = emptyDraft();
  layerVersion = 0;
  selectedBuildings: string[] = [];
  selectedEdges: string[] = [];
  comparison: [number, number] | null = null;
  private readonly entries: HistoryEntry[] = [];
  private nextId = 1;
  private seq = 0;

  setKind(kind: InterventionKind): void {
    // switching kind drops deltas the new kind may not carry
    const keep: Partial<Record<DeltaName, number>> = {};
    for (const name of allowedDeltas(kind)) {
      const v = this.draft.deltas[name];
      if (v !== undefined) keep[name] = v;
    }
    this.draft = { ...this.draft, kind, deltas: keep };
  }

  setDelta(name: DeltaName, value: number): void {
    if (!allowedDeltas(this.draft.kind).includes(name)) {
      throw new Error(`${this.draft.kind} does not accept ${name}`);
    }
    this.draft = {
      ...this.draft,
      deltas: { ...this.draft.deltas, [name]: clampToRange(name, value) },
    };
  }

  buildRequest(options: ScenarioRequest['options'], hazardScenarioId?: string): ScenarioRequest {
    this.seq += 1;
    return {
      schema_version: 1,
      request_id: `ui-${Date.now()}-${this.seq}`,
      prompt: { ...this.draft, deltas: { ...this.draft.deltas } },
      hazard_scenario_id: hazardScenarioId ?? null,
      options,
    };
  }

  record(request: ScenarioRequest, response: ScenarioResponse): HistoryEntry {
    const entry: HistoryEntry = Object.freeze({
      id: this.nextId++,
      request: Object.freeze(request),
      response: Object.freeze(response),
    });
    this.entries.push(entry);
    this.layerVersion = response.layer_version;
    return entry;
  }

  get history(): readonly HistoryEntry[] {
    return this.entries;
  }

  entry(id: number): HistoryEntry | undefined {
    return this.entries.find((e) => e.id === id);
  }

  selectComparison(a: number, b: number): boolean {
    if (!this.entry(a) || !this.entry(b)) return false; // disabled, not an error
    this.comparison = [a, b];
    return true;
  }

  /** Replayable request log: POSTing these reproduces the session. */
  exportHistory(): string {
    return JSON.stringify(
      this.entries.map((e) => e.request),
      null,
      2,
    );
  }
}
