/**
 * Color scales for the network view.
 *
 * Edge strokes grade from neutral (multiplier 1) to deep red as hazard
 * inflation grows; zones shade by reachability rate in five documented
 * buckets.
 */

export interface ShadeBucket {
  name: string;
  min: number; // inclusive
  max: number; // exclusive except the last bucket
  fill: string;
}

export const REACHABILITY_BUCKETS: ShadeBucket[] = [
  { name: 'very-low', min: 0.0, max: 0.2, fill: '#7f1d1d' },
  { name: 'low', min: 0.2, max: 0.4, fill: '#b45309' },
  { name: 'medium', min: 0.4, max: 0.6, fill: '#ca8a04' },
  { name: 'high', min: 0.6, max: 0.8, fill: '#4d7c0f' },
  { name: 'very-high', min: 0.8, max: 1.0, fill: '#166534' },
];

export function reachabilityBucket(rate: number): ShadeBucket {
  if (rate < 0 || rate > 1 || Number.isNaN(rate)) {
    throw new Error(`reachability rate must be in [0, 1], got ${rate}`);
  }
  for (const bucket of REACHABILITY_BUCKETS) {
    if (rate >= bucket.min && rate < bucket.max) return bucket;
  }
  return REACHABILITY_BUCKETS[REACHABILITY_BUCKETS.length - 1]!; // rate === 1.0
}

const MULTIPLIER_STOPS: [number, string][] = [
  [1.0, '#64748b'], // neutral slate: free flow
  [1.5, '#d97706'], // amber
  [2.5, '#dc2626'], // red
  [4.0, '#7f1d1d'], // deep red: heavy inflation
];

export function multiplierColor(multiplier: number): string {
  if (multiplier < 1) throw new Error(`multiplier must be >= 1, got ${multiplier}`);
  let chosen = MULTIPLIER_STOPS[0]![1];
  for (const [threshold, color] of MULTIPLIER_STOPS) {
    if (multiplier >= threshold) chosen = color;
  }
  return chosen;
}

export const REMOVED_EDGE_STYLE = {
  stroke: '#1f2937',
  dasharray: '6 4',
} as const;
