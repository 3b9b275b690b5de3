/**
 * Browser glue: wires the pure render helpers to the live service.
 *
 * Flow: load the current layer, draft an intervention with bounded sliders,
 * submit, inspect the returned deltas, revise; any two history entries can be
 * compared side by side. Numbers on screen always come from response fields.
 */

import { ApiClient, ApiError } from './api.js';
import { renderComparison } from './compare.js';
import { isAllZeroDelta, renderAccessibilityDelta, renderRiskDeltaTable } from './delta_table.js';
import { renderNetworkView, renderStaleBanner } from './network_view.js';
import { SLIDERS, clampToRange, sliderInputAttrs } from './sliders.js';
import { ViewState } from './state.js';
import type { DeltaName, InterventionKind, ScenarioVariant } from './types.js';

const state = new ViewState();
const api = new ApiClient('');

function el(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node;
}

async function refreshLayer(): Promise<void> {
  const view = el('network-view');
  try {
    const layer = await api.currentLayer();
    state.layerVersion = layer.version;
    view.innerHTML = renderNetworkView(layer);
  } catch (err) {
    const reason = err instanceof ApiError ? String(err.detail) : 'network failure';
    view.innerHTML = renderStaleBanner(reason);
    view.querySelector('[data-action="retry"]')?.addEventListener('click', () => {
      void refreshLayer();
    });
  }
}

function renderSliders(): void {
  const kind = state.draft.kind;
  const panel = el('sliders');
  panel.innerHTML = SLIDERS[kind]
    .map(
      (spec) =>
        `<label>${spec.label}` +
        `<input ${sliderInputAttrs(spec)} value="${state.draft.deltas[spec.name] ?? spec.min}">` +
        `<output>${state.draft.deltas[spec.name] ?? spec.min}</output></label>`,
    )
    .join('\n');
  panel.querySelectorAll('input[type="range"]').forEach((input) => {
    input.addEventListener('input', (ev) => {
      const target = ev.target as HTMLInputElement;
      const name = target.name as DeltaName;
      const value = clampToRange(name, Number(target.value));
      state.setDelta(name, value);
      (target.nextElementSibling as HTMLOutputElement).value = String(value);
    });
  });
}

function renderVariant(variant: ScenarioVariant): string {
  const zeroBadge = isAllZeroDelta(variant)
    ? '<p class="all-zero">No change: all deltas are zero.</p>'
    : '';
  return (
    `<h4>deltas at x${variant.factor}</h4>` +
    zeroBadge +
    renderAccessibilityDelta(variant) +
    renderRiskDeltaTable(variant)
  );
}

function renderHistory(): void {
  const list = el('history');
  list.innerHTML = state.history
    .map(
      (e) =>
        `<li data-entry="${e.id}">#${e.id} ${e.request.prompt.kind} ` +
        `(${e.request.prompt.label || 'unlabeled'}) ` +
        `<button data-compare="${e.id}">compare</button></li>`,
    )
    .join('\n');
  const picked: number[] = [];
  list.querySelectorAll('button[data-compare]').forEach((btn) => {
    btn.addEventListener('click', () => {
      picked.push(Number((btn as HTMLElement).dataset.compare));
      if (picked.length === 2) {
        const [a, b] = picked.splice(0, 2) as [number, number];
        if (state.selectComparison(a, b)) {
          const ea = state.entry(a)!;
          const eb = state.entry(b)!;
          el('compare-view').innerHTML = renderComparison(
            ea.response,
            eb.response,
            renderVariant,
          );
        }
      }
    });
  });
}

async function submitScenario(): Promise<void> {
  const errors = el('form-errors');
  errors.textContent = '';
  const request = state.buildRequest({
    n_samples: Number((el('n-samples') as HTMLInputElement).value) || 25,
    sensitivity: (el('sensitivity') as HTMLInputElement).checked,
    seed: Number((el('seed') as HTMLInputElement).value) || 0,
    max_buildings: 50,
  });
  try {
    const response = await api.runScenario(request);
    const entry = state.record(request, response);
    const variant = response.result.variants.find((v) => v.factor === 1.0);
    el('result-view').innerHTML = variant
      ? renderVariant(variant)
      : '<p>no primary variant</p>';
    renderHistory();
    el('layer-version').textContent = `layer v${entry.response.layer_version}`;
  } catch (err) {
    if (err instanceof ApiError) {
      const fields = err.fieldMessages();
      errors.innerHTML = Object.entries(fields)
        .map(([field, msg]) => `<p class="field-error" data-field="${field}">${field}: ${msg}</p>`)
        .join('');
    } else {
      errors.textContent = 'request failed';
    }
  }
}

function bind(): void {
  (el('kind') as HTMLSelectElement).addEventListener('change', (ev) => {
    state.setKind((ev.target as HTMLSelectElement).value as InterventionKind);
    renderSliders();
  });
  el('label-input').addEventListener('input', (ev) => {
    state.draft = { ...state.draft, label: (ev.target as HTMLInputElement).value };
  });
  el('submit').addEventListener('click', () => void submitScenario());
  el('export-history').addEventListener('click', () => {
    const blob = new Blob([state.exportHistory()], { type: 'application/json' });
    const a = document.createElement('a');
    a.href = URL.createObjectURL(blob);
    a.download = 'scenario-history.json';
    a.click();
  });
  renderSliders();
  void refreshLayer();
}

if (typeof document !== 'undefined' && document.readyState !== 'loading') {
  bind();
} else if (typeof document !== 'undefined') {
  document.addEventListener('DOMContentLoaded', bind);
}
