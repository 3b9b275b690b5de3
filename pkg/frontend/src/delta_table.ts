/**
 * Delta rendering: accessibility deltas and per-building risk deltas.
 *
 * Strict pass-through: every cell is String(value) of a response field. The
 * snapshot tests pin this, so any client-side recomputation would fail them.
 */

import type { ScenarioVariant } from './types.js';

const ACCESS_FIELDS = ['reachability_rate', 'mean_travel_time_s', 'mean_redundancy'] as const;

function cell(value: number | null | undefined): string {
  return value === null || value === undefined ? '–' : String(value);
}

export function renderAccessibilityDelta(variant: ScenarioVariant): string {
  const rows = ACCESS_FIELDS.map((name) => {
    const base = variant.accessibility.baseline[name];
    const scen = variant.accessibility.scenario[name];
    const delta = variant.accessibility.delta[name];
    return (
      `<tr data-metric="${name}">` +
      `<th>${name}</th>` +
      `<td class="before">${cell(base)}</td>` +
      `<td class="after">${cell(scen)}</td>` +
      `<td class="delta" data-value="${cell(delta)}">${cell(delta)}</td>` +
      `</tr>`
    );
  });
  return (
    `<table class="accessibility-delta" data-factor="${variant.factor}">` +
    `<thead><tr><th>metric</th><th>before</th><th>after</th><th>delta</th></tr></thead>` +
    `<tbody>${rows.join('')}</tbody></table>`
  );
}

export function renderRiskDeltaTable(variant: ScenarioVariant): string {
  const buildings = Object.keys(variant.risk_delta).sort();
  const targets =
    buildings.length > 0 ? Object.keys(variant.risk_delta[buildings[0]!]!) : [];
  const head =
    `<tr><th>building</th>` +
    targets.map((t) => `<th colspan="3">${t}</th>`).join('') +
    `</tr>` +
    `<tr><th></th>` +
    targets.map(() => `<th>mean</th><th>5%</th><th>95%</th>`).join('') +
    `</tr>`;
  const body = buildings
    .map((b) => {
      const cells = targets
        .map((t) => {
          const d = variant.risk_delta[b]![t]!;
          return (
            `<td class="mean" data-building="${b}" data-target="${t}">${String(d.mean)}</td>` +
            `<td class="ci-low">${String(d.ci_low)}</td>` +
            `<td class="ci-high">${String(d.ci_high)}</td>`
          );
        })
        .join('');
      return `<tr data-building="${b}"><th>${b}</th>${cells}</tr>`;
    })
    .join('');
  return (
    `<table class="risk-delta" data-factor="${variant.factor}">` +
    `<thead>${head}</thead><tbody>${body}</tbody></table>`
  );
}

/** True when every rendered delta in the variant is exactly zero. */
export function isAllZeroDelta(variant: ScenarioVariant): boolean {
  for (const name of ACCESS_FIELDS) {
    const v = variant.accessibility.delta[name];
    if (v !== null && v !== undefined && v !== 0) return false;
  }
  for (const perTarget of Object.values(variant.risk_delta)) {
    for (const d of Object.values(perTarget)) {
      if (d.mean !== 0 || d.ci_low !== 0 || d.ci_high !== 0) return false;
    }
  }
  return true;
}
