/**
 * SVG rendering of a published risk layer.
 *
 * Node coordinates are used directly (no basemap): lon/lat map linearly into
 * the viewbox. Edges are colored by multiplier (dashed when removed); zones
 * whose ids encode km-grid cells ("z<x>-<y>") are drawn as shaded squares,
 * and every zone also appears as a legend chip. The legend carries the layer
 * version and generated_at verbatim.
 */

import { multiplierColor, REMOVED_EDGE_STYLE, reachabilityBucket } from './colors.js';
import type { RiskLayer } from './types.js';

const VIEW_SIZE = 800;
const ZONE_ID_PATTERN = /^z(-?\d+)-(-?\d+)$/;

interface Extent {
  minLon: number;
  maxLon: number;
  minLat: number;
  maxLat: number;
}

function layerExtent(layer: RiskLayer): Extent {
  let minLon = Infinity;
  let maxLon = -Infinity;
  let minLat = Infinity;
  let maxLat = -Infinity;
  for (const feat of layer.weight_layer.features) {
    for (const [lon, lat] of feat.geometry.coordinates) {
      minLon = Math.min(minLon, lon);
      maxLon = Math.max(maxLon, lon);
      minLat = Math.min(minLat, lat);
      maxLat = Math.max(maxLat, lat);
    }
  }
  if (!Number.isFinite(minLon)) {
    return { minLon: 0, maxLon: 1, minLat: 0, maxLat: 1 };
  }
  return { minLon, maxLon, minLat, maxLat };
}

function projector(extent: Extent): (lon: number, lat: number) => [number, number] {
  const spanLon = extent.maxLon - extent.minLon || 1;
  const spanLat = extent.maxLat - extent.minLat || 1;
  return (lon, lat) => [
    ((lon - extent.minLon) / spanLon) * VIEW_SIZE,
    // SVG y grows downward; lat grows upward
    VIEW_SIZE - ((lat - extent.minLat) / spanLat) * VIEW_SIZE,
  ];
}

function edgeSvg(layer: RiskLayer, project: (lon: number, lat: number) => [number, number]): string {
  const lines: string[] = [];
  for (const feat of layer.weight_layer.features) {
    const coords = feat.geometry.coordinates;
    if (coords.length < 2) continue;
    const [x1, y1] = project(coords[0]![0], coords[0]![1]);
    const [x2, y2] = project(coords[1]![0], coords[1]![1]);
    const props = feat.properties;
    const base = `x1="${x1.toFixed(1)}" y1="${y1.toFixed(1)}" x2="${x2.toFixed(1)}" y2="${y2.toFixed(1)}"`;
    if (props.removed) {
      lines.push(
        `<line data-edge="${props.edge_id}" class="edge removed" ${base} ` +
          `stroke="${REMOVED_EDGE_STYLE.stroke}" stroke-dasharray="${REMOVED_EDGE_STYLE.dasharray}" stroke-width="2"/>`,
      );
    } else {
      const color = multiplierColor(props.multiplier ?? 1);
      lines.push(
        `<line data-edge="${props.edge_id}" class="edge" data-multiplier="${props.multiplier}" ` +
          `${base} stroke="${color}" stroke-width="2"/>`,
      );
    }
  }
  return lines.join('\n');
}

function zoneChips(layer: RiskLayer): string {
  const chips: string[] = [];
  for (const zone of Object.keys(layer.zone_summaries).sort()) {
    const summary = layer.zone_summaries[zone]!;
    const bucket = reachabilityBucket(summary.reachability_rate);
    chips.push(
      `<span class="zone-chip bucket-${bucket.name}" data-zone="${zone}" ` +
        `data-rate="${summary.reachability_rate}" style="background:${bucket.fill}">` +
        `${zone}: ${String(summary.reachability_rate)}</span>`,
    );
  }
  return chips.join('\n');
}

export function renderLegend(layer: RiskLayer): string {
  return (
    `<div class="legend" data-layer-version="${layer.version}">` +
    `<span class="legend-version">layer v${layer.version}</span> ` +
    `<span class="legend-generated">${layer.generated_at}</span> ` +
    `<span class="legend-cadence">every ${layer.cadence_s}s</span>` +
    `</div>`
  );
}

export function renderNetworkView(layer: RiskLayer): string {
  const extent = layerExtent(layer);
  const project = projector(extent);
  const zoneRects: string[] = [];
  for (const zone of Object.keys(layer.zone_summaries).sort()) {
    const match = ZONE_ID_PATTERN.exec(zone);
    if (!match) continue;
    const summary = layer.zone_summaries[zone]!;
    const bucket = reachabilityBucket(summary.reachability_rate);
    zoneRects.push(
      `<rect class="zone bucket-${bucket.name}" data-zone="${zone}" ` +
        `fill="${bucket.fill}" fill-opacity="0.25" data-grid="${match[1]},${match[2]}"/>`,
    );
  }
  return (
    `<svg viewBox="0 0 ${VIEW_SIZE} ${VIEW_SIZE}" xmlns="http://www.w3.org/2000/svg">\n` +
    `<g class="zones">\n${zoneRects.join('\n')}\n</g>\n` +
    `<g class="edges">\n${edgeSvg(layer, project)}\n</g>\n` +
    `</svg>\n` +
    renderLegend(layer) +
    `\n<div class="zone-chips">\n${zoneChips(layer)}\n</div>`
  );
}

export function renderStaleBanner(reason: string): string {
  return (
    `<div class="banner stale-layer" role="alert">` +
    `Layer unavailable: ${reason} ` +
    `<button class="retry" data-action="retry">Retry</button></div>`
  );
}
