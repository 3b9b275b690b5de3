/**
 * Scenario comparison: collect the paths where two responses disagree so the
 * side-by-side view can highlight exactly those cells.
 */

import type { ScenarioResponse, ScenarioVariant } from './types.js';

export interface Difference {
  path: string;
  a: unknown;
  b: unknown;
}

function walk(a: unknown, b: unknown, path: string, out: Difference[]): void {
  if (a === b) return;
  if (
    typeof a === 'object' &&
    typeof b === 'object' &&
    a !== null &&
    b !== null &&
    Array.isArray(a) === Array.isArray(b)
  ) {
    const keys = new Set([...Object.keys(a), ...Object.keys(b)]);
    for (const key of [...keys].sort()) {
      walk(
        (a as Record<string, unknown>)[key],
        (b as Record<string, unknown>)[key],
        path ? `${path}.${key}` : key,
        out,
      );
    }
    return;
  }
  out.push({ path, a, b });
}

/** Differences between the primary (factor 1) variants of two responses. */
export function diffPrimaryVariants(a: ScenarioResponse, b: ScenarioResponse): Difference[] {
  const va = primaryVariant(a);
  const vb = primaryVariant(b);
  const out: Difference[] = [];
  walk(va.risk_delta, vb.risk_delta, 'risk_delta', out);
  walk(va.accessibility.delta, vb.accessibility.delta, 'accessibility.delta', out);
  walk(va.mean_risk_delta, vb.mean_risk_delta, 'mean_risk_delta', out);
  return out;
}

export function primaryVariant(response: ScenarioResponse): ScenarioVariant {
  const v = response.result.variants.find((x) => x.factor === 1.0);
  if (!v) throw new Error('response has no factor-1 variant');
  return v;
}

export function renderComparison(
  a: ScenarioResponse,
  b: ScenarioResponse,
  renderVariant: (v: ScenarioVariant) => string,
): string {
  const differences = diffPrimaryVariants(a, b);
  const highlightAttr = differences.length
    ? ` data-highlights="${differences.length}"`
    : ' data-highlights="0"';
  return (
    `<div class="compare"${highlightAttr}>` +
    `<section class="compare-a" data-request="${a.request_id}">${renderVariant(primaryVariant(a))}</section>` +
    `<section class="compare-b" data-request="${b.request_id}">${renderVariant(primaryVariant(b))}</section>` +
    `<ul class="compare-diffs">` +
    differences
      .map((d) => `<li data-path="${d.path}">${d.path}: ${String(d.a)} vs ${String(d.b)}</li>`)
      .join('') +
    `</ul></div>`
  );
}
