/**
 * Slider definitions for intervention deltas.
 *
 * Bounds are the documented intervention ranges, hard-wired so that
 * out-of-range input is impossible by construction: values from the UI pass
 * through clampToRange before they ever reach a request.
 */

import type { DeltaName, InterventionKind } from './types.js';

export interface SliderSpec {
  name: DeltaName;
  min: number;
  max: number;
  step: number;
  label: string;
}

export const DELTA_RANGES: Record<DeltaName, [number, number]> = {
  imperviousness_reduction: [0, 0.2],
  drainage_gain: [0, 0.3],
  structural_points: [0, 15],
  capacity_gain: [0, 0.5],
};

export const SLIDERS: Record<InterventionKind, SliderSpec[]> = {
  green_infrastructure: [
    {
      name: 'imperviousness_reduction',
      min: 0,
      max: 0.2,
      step: 0.01,
      label: 'Imperviousness reduction',
    },
    { name: 'drainage_gain', min: 0, max: 0.3, step: 0.01, label: 'Drainage capacity gain' },
  ],
  building_retrofit: [
    { name: 'structural_points', min: 0, max: 15, step: 0.5, label: 'Structural score points' },
  ],
  transportation_upgrade: [
    { name: 'capacity_gain', min: 0, max: 0.5, step: 0.01, label: 'Evacuation capacity gain' },
  ],
};

export function clampToRange(name: DeltaName, value: number): number {
  const [lo, hi] = DELTA_RANGES[name];
  if (Number.isNaN(value)) return lo;
  return Math.min(hi, Math.max(lo, value));
}

/** Deltas a prompt of this kind may carry, all others must stay absent. */
export function allowedDeltas(kind: InterventionKind): DeltaName[] {
  return SLIDERS[kind].map((s) => s.name);
}

export function sliderInputAttrs(spec: SliderSpec): string {
  return `type="range" name="${spec.name}" min="${spec.min}" max="${spec.max}" step="${spec.step}"`;
}
