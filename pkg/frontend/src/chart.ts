// Inline-SVG chart of cumulative observed (S_G) vs declared expected
// (S_H) information across a session. Both series come straight from
// the API's per-record running sums.

import type { SummaryRow } from "./api.js";

const WIDTH = 560;
const HEIGHT = 180;
const PAD = { left: 44, right: 12, top: 12, bottom: 24 };

function scaleX(t: number, tMax: number): number {
  const span = WIDTH - PAD.left - PAD.right;
  return PAD.left + (tMax <= 1 ? span : ((t - 1) / (tMax - 1)) * span);
}

function scaleY(v: number, vMax: number): number {
  const span = HEIGHT - PAD.top - PAD.bottom;
  return HEIGHT - PAD.bottom - (vMax <= 0 ? 0 : (v / vMax) * span);
}

function polyline(points: string, cls: string): string {
  return `<polyline class="${cls}" fill="none" points="${points}"/>`;
}

export function renderCumulativeChart(rows: SummaryRow[]): string {
  if (rows.length === 0) {
    return `<svg class="chart" viewBox="0 0 ${WIDTH} ${HEIGHT}" role="img" aria-label="empty cumulative chart"><text x="${WIDTH / 2}" y="${HEIGHT / 2}" text-anchor="middle" class="chart-empty">no iterations yet</text></svg>`;
  }
  const tMax = rows[rows.length - 1].t;
  const vMax = Math.max(
    ...rows.map((r) => r.s_g_after),
    ...rows.map((r) => r.s_h_after),
  );

  const gPoints = rows
    .map((r) => `${scaleX(r.t, tMax).toFixed(1)},${scaleY(r.s_g_after, vMax).toFixed(1)}`)
    .join(" ");
  const hPoints = rows
    .map((r) => `${scaleX(r.t, tMax).toFixed(1)},${scaleY(r.s_h_after, vMax).toFixed(1)}`)
    .join(" ");

  const markers = rows
    .map((r) => {
      const cx = scaleX(r.t, tMax).toFixed(1);
      const cy = scaleY(r.s_g_after, vMax).toFixed(1);
      const cls = r.verdict === "AsExpected" ? "dot-expected" : "dot-unexpected";
      return `<circle class="${cls}" cx="${cx}" cy="${cy}" r="4"><title>t=${r.t} ${r.verdict}</title></circle>`;
    })
    .join("");

  const axis = `<line class="chart-axis" x1="${PAD.left}" y1="${HEIGHT - PAD.bottom}" x2="${WIDTH - PAD.right}" y2="${HEIGHT - PAD.bottom}"/><line class="chart-axis" x1="${PAD.left}" y1="${PAD.top}" x2="${PAD.left}" y2="${HEIGHT - PAD.bottom}"/>`;
  const legend = `<text x="${WIDTH - PAD.right}" y="${PAD.top + 10}" text-anchor="end" class="legend"><tspan class="legend-g">— S_G</tspan>  <tspan class="legend-h">- - S_H</tspan></text>`;

  return `<svg class="chart" viewBox="0 0 ${WIDTH} ${HEIGHT}" role="img" aria-label="cumulative information chart">${axis}${polyline(hPoints, "line-h")}${polyline(gPoints, "line-g")}${markers}${legend}</svg>`;
}
