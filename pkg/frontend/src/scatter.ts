/**
 * Tier scatter: PIC on x, ACB on y, threshold guide lines, points colored
 * by risk tier with labels on the high-tier points.
 */

import { linear, paddedExtent } from "./scale.js";
import { el, fmt, svgDocument, text } from "./svg.js";
import { PlotDataDocument, Tier } from "./types.js";

export const TIER_COLORS: Record<Tier, string> = {
  High: "#d62728",
  Moderate: "#ff8c00",
  Low: "#8c8c8c",
};

const WIDTH = 860;
const HEIGHT = 560;
const MARGIN = { top: 48, right: 168, bottom: 58, left: 72 };

export function renderScatter(doc: PlotDataDocument): string {
  const { scatter, thresholds } = doc;
  const plotW = WIDTH - MARGIN.left - MARGIN.right;
  const plotH = HEIGHT - MARGIN.top - MARGIN.bottom;

  const xDomain = paddedExtent(
    [...scatter.map((p) => p.pic), thresholds.pic],
    [0, 1],
  );
  const x = linear([Math.max(0, xDomain[0]), Math.min(1.02, Math.max(1, xDomain[1]))], [
    MARGIN.left,
    MARGIN.left + plotW,
  ]);
  const yDomain = paddedExtent(
    [...scatter.map((p) => p.acb), thresholds.acb, 1],
    [0, 2],
  );
  const y = linear(yDomain, [MARGIN.top + plotH, MARGIN.top]);

  const parts: string[] = [];

  // axes and grid
  for (const tick of x.ticks(6)) {
    const px = x(tick);
    parts.push(el("line", { x1: px, y1: MARGIN.top, x2: px, y2: MARGIN.top + plotH, stroke: "#eeeeee", "stroke-width": 1 }));
    parts.push(el("line", { x1: px, y1: MARGIN.top + plotH, x2: px, y2: MARGIN.top + plotH + 5, stroke: "#333333", "stroke-width": 1 }));
    parts.push(text(String(tick), { x: px, y: MARGIN.top + plotH + 20, "text-anchor": "middle", "font-size": 12, fill: "#333333" }));
  }
  for (const tick of y.ticks(6)) {
    const py = y(tick);
    parts.push(el("line", { x1: MARGIN.left, y1: py, x2: MARGIN.left + plotW, y2: py, stroke: "#eeeeee", "stroke-width": 1 }));
    parts.push(el("line", { x1: MARGIN.left - 5, y1: py, x2: MARGIN.left, y2: py, stroke: "#333333", "stroke-width": 1 }));
    parts.push(text(String(tick), { x: MARGIN.left - 9, y: py + 4, "text-anchor": "end", "font-size": 12, fill: "#333333" }));
  }
  parts.push(el("rect", { x: MARGIN.left, y: MARGIN.top, width: plotW, height: plotH, fill: "none", stroke: "#333333", "stroke-width": 1 }));

  // threshold guides
  const tx = x(thresholds.pic);
  const ty = y(thresholds.acb);
  parts.push(el("line", { x1: tx, y1: MARGIN.top, x2: tx, y2: MARGIN.top + plotH, stroke: "#555555", "stroke-width": 1, "stroke-dasharray": "5,4" }));
  parts.push(el("line", { x1: MARGIN.left, y1: ty, x2: MARGIN.left + plotW, y2: ty, stroke: "#555555", "stroke-width": 1, "stroke-dasharray": "5,4" }));
  parts.push(text(`PIC ≥ ${thresholds.pic}`, { x: tx + 4, y: MARGIN.top + 12, "font-size": 11, fill: "#555555" }));
  parts.push(text(`ACB ≥ ${thresholds.acb}`, { x: MARGIN.left + 4, y: ty - 5, "font-size": 11, fill: "#555555" }));

  // points, low tiers first so high-tier points stay visible
  const order: Tier[] = ["Low", "Moderate", "High"];
  for (const tier of order) {
    for (const p of scatter.filter((q) => q.tier === tier)) {
      parts.push(
        el("circle", {
          cx: x(p.pic),
          cy: y(p.acb),
          r: 5,
          fill: TIER_COLORS[tier],
          "fill-opacity": 0.85,
          stroke: "#ffffff",
          "stroke-width": 0.8,
          "data-tier": tier,
          "data-label": p.label,
        }),
      );
      if (tier === "High") {
        parts.push(
          text(p.label, {
            x: x(p.pic) - 7,
            y: y(p.acb) - 7,
            "text-anchor": "end",
            "font-size": 10,
            fill: "#222222",
          }),
        );
      }
    }
  }

  // axis titles and legend
  parts.push(text("PIC (proportion of pairs with increased confidence)", { x: MARGIN.left + plotW / 2, y: HEIGHT - 14, "text-anchor": "middle", "font-size": 13, fill: "#111111" }));
  parts.push(
    `<text x="${fmt(20)}" y="${fmt(MARGIN.top + plotH / 2)}" text-anchor="middle" font-size="13" fill="#111111" transform="rotate(-90 20 ${fmt(MARGIN.top + plotH / 2)})">ACB (average confidence boost)</text>`,
  );
  const legendX = MARGIN.left + plotW + 18;
  let legendY = MARGIN.top + 8;
  parts.push(text("Risk tier", { x: legendX, y: legendY - 2, "font-size": 12, fill: "#111111", "font-weight": "bold" }));
  for (const tier of ["High", "Moderate", "Low"] as Tier[]) {
    legendY += 20;
    parts.push(el("circle", { cx: legendX + 6, cy: legendY - 4, r: 5, fill: TIER_COLORS[tier] }));
    parts.push(text(tier, { x: legendX + 17, y: legendY, "font-size": 12, fill: "#333333" }));
  }
  if (scatter.length === 0) {
    parts.push(text("no classified indicators", { x: MARGIN.left + plotW / 2, y: MARGIN.top + plotH / 2, "text-anchor": "middle", "font-size": 14, fill: "#999999" }));
  }

  return svgDocument(WIDTH, HEIGHT, parts);
}
