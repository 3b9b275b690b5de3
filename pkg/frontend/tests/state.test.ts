import { describe, expect, it } from 'vitest';

import { ViewState, emptyDraft } from '../src/state.js';
import type { ScenarioRequest, ScenarioResponse } from '../src/types.js';

import identityFixture from './fixtures/scenario_identity.json';

const response = identityFixture as unknown as ScenarioResponse;

function makeState(): ViewState {
  return new ViewState();
}

function sampleRequest(state: ViewState): ScenarioRequest {
  return state.buildRequest({ n_samples: 6, sensitivity: false, seed: 4, max_buildings: 3 });
}

describe('draft editing', () => {
  it('clamps slider values into range', () => {
    const state = makeState();
    state.setDelta('drainage_gain', 0.9);
    expect(state.draft.deltas.drainage_gain).toBe(0.3);
  });

  it('rejects deltas foreign to the active kind', () => {
    const state = makeState();
    expect(() => state.setDelta('capacity_gain', 0.1)).toThrow(/green_infrastructure/);
  });

  it('switching kind drops deltas the new kind cannot carry', () => {
    const state = makeState();
    state.setDelta('drainage_gain', 0.2);
    state.setKind('transportation_upgrade');
    expect(state.draft.deltas).toEqual({});
    state.setDelta('capacity_gain', 0.4);
    expect(state.draft.deltas.capacity_gain).toBe(0.4);
  });
});

describe('history', () => {
  it('is append-only and entries are immutable once received', () => {
    const state = makeState();
    const req = sampleRequest(state);
    const entry = state.record(req, response);
    expect(state.history.length).toBe(1);
    expect(Object.isFrozen(entry)).toBe(true);
    expect(Object.isFrozen(entry.response)).toBe(true);
    expect(() => {
      (entry as { id: number }).id = 99;
    }).toThrow();
    state.record(sampleRequest(state), response);
    expect(state.history.length).toBe(2);
    expect(state.history[0]!.id).toBe(1); // earlier entries untouched
  });

  it('submit, edit, resubmit yields two comparable entries', () => {
    const state = makeState();
    state.setDelta('drainage_gain', 0.1);
    const a = state.record(sampleRequest(state), response);
    state.setDelta('drainage_gain', 0.2);
    const b = state.record(sampleRequest(state), response);
    expect(a.request.prompt.deltas.drainage_gain).toBe(0.1);
    expect(b.request.prompt.deltas.drainage_gain).toBe(0.2);
    expect(state.selectComparison(a.id, b.id)).toBe(true);
    expect(state.comparison).toEqual([a.id, b.id]);
  });

  it('comparison with a missing entry is disabled, not an error', () => {
    const state = makeState();
    const a = state.record(sampleRequest(state), response);
    expect(state.selectComparison(a.id, 42)).toBe(false);
    expect(state.comparison).toBeNull();
  });

  it('export yields replayable ScenarioRequest JSON', () => {
    const state = makeState();
    state.setDelta('drainage_gain', 0.3);
    const req = sampleRequest(state);
    state.record(req, response);
    const exported = JSON.parse(state.exportHistory()) as ScenarioRequest[];
    expect(exported).toHaveLength(1);
    expect(exported[0]).toEqual(req);
    expect(exported[0]!.schema_version).toBe(1);
    expect(exported[0]!.prompt.deltas.drainage_gain).toBe(0.3);
  });

  it('tracks the layer version from responses', () => {
    const state = makeState();
    state.record(sampleRequest(state), response);
    expect(state.layerVersion).toBe(response.layer_version);
  });
});

describe('emptyDraft', () => {
  it('starts with no deltas and an all-selector', () => {
    const draft = emptyDraft();
    expect(draft.deltas).toEqual({});
    expect(draft.selector).toEqual({ all: true, ids: [] });
  });
});
