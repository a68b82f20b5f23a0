import { describe, expect, it } from "vitest";

import type { SummaryRow } from "../src/api.js";
import { renderCumulativeChart } from "../src/chart.js";

function row(t: number, verdict: string, sg: number, sh: number): SummaryRow {
  return {
    t,
    tool_id: "row_count",
    expected_set: "{1000}",
    p_hat: 0.99,
    observed: 1000,
    verdict,
    g: 0.1,
    h: 0.08,
    m: 6.6,
    s_g_after: sg,
    s_h_after: sh,
  };
}

describe("cumulative chart", () => {
  it("renders a placeholder for an empty session", () => {
    const svg = renderCumulativeChart([]);
    expect(svg).toContain("<svg");
    expect(svg).toContain("no iterations yet");
  });

  it("renders both series and verdict-colored markers", () => {
    const rows = [
      row(1, "AsExpected", 0.0145, 0.0808),
      row(2, "Unexpected", 6.6584, 0.1616),
    ];
    const svg = renderCumulativeChart(rows);
    expect(svg.match(/<polyline/g)?.length).toBe(2);
    expect(svg).toContain("line-g");
    expect(svg).toContain("line-h");
    expect(svg).toContain("dot-expected");
    expect(svg).toContain("dot-unexpected");
    expect(svg.match(/<circle/g)?.length).toBe(2);
  });

  it("keeps points inside the viewbox", () => {
    const rows = [row(1, "AsExpected", 5, 1), row(2, "AsExpected", 9, 2)];
    const svg = renderCumulativeChart(rows);
    for (const match of svg.matchAll(/cx="([\d.]+)" cy="([\d.]+)"/g)) {
      expect(Number(match[1])).toBeGreaterThanOrEqual(0);
      expect(Number(match[1])).toBeLessThanOrEqual(560);
      expect(Number(match[2])).toBeGreaterThanOrEqual(0);
      expect(Number(match[2])).toBeLessThanOrEqual(180);
    }
  });
});
