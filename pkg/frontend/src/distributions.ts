/**
 * Distribution panel: one row per indicator with a horizontal violin over
 * all confidence ratios and the sampled swarm on top; a second panel puts
 * each indicator's geometric-mean ratio as a bar, highlighted when it
 * clears the configured mark.
 */

import { linear, paddedExtent } from "./scale.js";
import { el, svgDocument, text } from "./svg.js";
import { PlotDataDocument } from "./types.js";

const ROW_H = 30;
const TOP = 52;
const BOTTOM = 52;
const LABEL_W = 230;
const VIOLIN_W = 430;
const GAP = 46;
const BAR_W = 230;
const RIGHT = 28;

const HIGHLIGHT_COLOR = "#7b2d8b";
const PLAIN_COLOR = "#3b6fb6";

export interface DistributionOptions {
  /** Plot raw confidence ratios instead of their natural logs. */
  rawCr?: boolean;
}

function gaussianKde(values: number[], grid: number[]): number[] {
  const n = values.length;
  const mean = values.reduce((a, b) => a + b, 0) / n;
  const variance = values.reduce((a, b) => a + (b - mean) ** 2, 0) / n;
  const sd = Math.sqrt(variance);
  // Silverman's rule, clamped so degenerate lists still render
  const h = Math.max(1.06 * sd * n ** -0.2, 1e-9);
  return grid.map((g) => {
    let acc = 0;
    for (const v of values) {
      const z = (g - v) / h;
      acc += Math.exp(-0.5 * z * z);
    }
    return acc / (n * h * Math.sqrt(2 * Math.PI));
  });
}

/** Deterministic per-point vertical jitter for the swarm overlay. */
function jitter(label: string, index: number): number {
  let hash = 2166136261;
  const key = `${label}#${index}`;
  for (let i = 0; i < key.length; i++) {
    hash = Math.imul(hash ^ key.charCodeAt(i), 16777619);
  }
  return ((hash >>> 8) % 1000) / 1000 - 0.5;
}

export function renderDistributions(
  doc: PlotDataDocument,
  options: DistributionOptions = {},
): string {
  const rawCr = options.rawCr ?? false;
  const labels = doc.scatter.map((p) => p.label); // document order
  const nRows = Math.max(1, labels.length);
  const width = LABEL_W + VIOLIN_W + GAP + BAR_W + RIGHT;
  const height = TOP + nRows * ROW_H + BOTTOM;

  const transform = (v: number) => (rawCr ? Math.exp(v) : v);
  const violinValues: Record<string, number[]> = {};
  const swarmValues: Record<string, number[]> = {};
  for (const label of labels) {
    violinValues[label] = doc.violin[label].map(transform);
    swarmValues[label] = doc.swarm[label].map((v) => (rawCr ? v : Math.log(v)));
  }

  const allValues = labels.flatMap((l) => violinValues[l].concat(swarmValues[l]));
  const reference = rawCr ? 1 : 0; // ratio 1 means "no confidence change"
  const vDomain = paddedExtent([...allValues, reference], rawCr ? [0, 2] : [-1, 1]);
  const vx = linear(vDomain, [LABEL_W, LABEL_W + VIOLIN_W]);

  const acbs = labels.map((l) => doc.histogram[l]);
  const highlight = doc.thresholds.histogram_highlight;
  const bDomain = paddedExtent([...acbs, 1, highlight], [0, 2]);
  const bx = linear(bDomain, [LABEL_W + VIOLIN_W + GAP, LABEL_W + VIOLIN_W + GAP + BAR_W]);

  const parts: string[] = [];
  parts.push(text(rawCr ? "confidence ratio" : "ln confidence ratio", {
    x: LABEL_W + VIOLIN_W / 2, y: 24, "text-anchor": "middle", "font-size": 13, fill: "#111111",
  }));
  parts.push(text("geometric mean (ACB)", {
    x: LABEL_W + VIOLIN_W + GAP + BAR_W / 2, y: 24, "text-anchor": "middle", "font-size": 13, fill: "#111111",
  }));

  // reference and highlight guides
  const plotTop = TOP - 6;
  const plotBottom = TOP + nRows * ROW_H + 6;
  parts.push(el("line", { x1: vx(reference), y1: plotTop, x2: vx(reference), y2: plotBottom, stroke: "#888888", "stroke-width": 1, "stroke-dasharray": "4,4" }));
  const bRef = bx(1);
  parts.push(el("line", { x1: bRef, y1: plotTop, x2: bRef, y2: plotBottom, stroke: "#888888", "stroke-width": 1, "stroke-dasharray": "4,4" }));
  const bHigh = bx(highlight);
  parts.push(el("line", { x1: bHigh, y1: plotTop, x2: bHigh, y2: plotBottom, stroke: HIGHLIGHT_COLOR, "stroke-width": 1, "stroke-dasharray": "2,3" }));

  labels.forEach((label, row) => {
    const cy = TOP + row * ROW_H + ROW_H / 2;
    parts.push(text(label, {
      x: LABEL_W - 10, y: cy + 4, "text-anchor": "end", "font-size": 11, fill: "#222222",
    }));
    if (row % 2 === 1) {
      parts.push(el("rect", {
        x: LABEL_W, y: cy - ROW_H / 2, width: VIOLIN_W + GAP + BAR_W, height: ROW_H,
        fill: "#000000", "fill-opacity": 0.025,
      }));
    }

    const values = violinValues[label];
    const lo = Math.min(...values);
    const hi = Math.max(...values);
    const maxHalf = ROW_H * 0.42;
    if (values.length < 2 || lo === hi) {
      // degenerate distribution: a slim diamond marks the single location
      const cx = vx(lo);
      parts.push(el("path", {
        d: `M ${cx - 5} ${cy} L ${cx} ${cy - maxHalf / 2} L ${cx + 5} ${cy} L ${cx} ${cy + maxHalf / 2} Z`
          .replace(/(-?\d+\.?\d*)/g, (m) => Number(m).toFixed(2)),
        fill: "#b8cbe4", stroke: "#4a6fa5", "stroke-width": 1,
      }));
    } else {
      const grid: number[] = [];
      const steps = 60;
      const span = hi - lo;
      const pad = span * 0.08;
      for (let i = 0; i <= steps; i++) {
        grid.push(lo - pad + ((span + 2 * pad) * i) / steps);
      }
      const density = gaussianKde(values, grid);
      const peak = Math.max(...density);
      const upper = grid.map((g, i) => `${vx(g).toFixed(2)},${(cy - (density[i] / peak) * maxHalf).toFixed(2)}`);
      const lower = grid
        .map((g, i) => `${vx(g).toFixed(2)},${(cy + (density[i] / peak) * maxHalf).toFixed(2)}`)
        .reverse();
      parts.push(el("polygon", {
        points: [...upper, ...lower].join(" "),
        fill: "#b8cbe4", "fill-opacity": 0.9, stroke: "#4a6fa5", "stroke-width": 1,
      }));
    }

    swarmValues[label].forEach((v, i) => {
      parts.push(el("circle", {
        cx: vx(v), cy: cy + jitter(label, i) * ROW_H * 0.55, r: 1.8,
        fill: "#26456e", "fill-opacity": 0.75,
      }));
    });

    const acb = doc.histogram[label];
    const distinguished = acb >= highlight;
    const x0 = Math.min(bRef, bx(acb));
    const barW = Math.abs(bx(acb) - bRef);
    parts.push(el("rect", {
      x: x0, y: cy - ROW_H * 0.32, width: Math.max(barW, 0.5), height: ROW_H * 0.64,
      fill: distinguished ? HIGHLIGHT_COLOR : PLAIN_COLOR,
      "data-label": label,
      "data-highlight": distinguished ? "yes" : "no",
    }));
  });

  // value axes under both panels
  for (const tick of vx.ticks(6)) {
    parts.push(el("line", { x1: vx(tick), y1: plotBottom, x2: vx(tick), y2: plotBottom + 5, stroke: "#333333", "stroke-width": 1 }));
    parts.push(text(String(tick), { x: vx(tick), y: plotBottom + 18, "text-anchor": "middle", "font-size": 11, fill: "#333333" }));
  }
  for (const tick of bx.ticks(4)) {
    parts.push(el("line", { x1: bx(tick), y1: plotBottom, x2: bx(tick), y2: plotBottom + 5, stroke: "#333333", "stroke-width": 1 }));
    parts.push(text(String(tick), { x: bx(tick), y: plotBottom + 18, "text-anchor": "middle", "font-size": 11, fill: "#333333" }));
  }
  parts.push(el("line", { x1: LABEL_W, y1: plotBottom, x2: LABEL_W + VIOLIN_W, y2: plotBottom, stroke: "#333333", "stroke-width": 1 }));
  parts.push(el("line", { x1: LABEL_W + VIOLIN_W + GAP, y1: plotBottom, x2: width - RIGHT, y2: plotBottom, stroke: "#333333", "stroke-width": 1 }));

  if (labels.length === 0) {
    parts.push(text("no classified indicators", { x: width / 2, y: TOP + ROW_H, "text-anchor": "middle", "font-size": 14, fill: "#999999" }));
  }

  return svgDocument(width, height, parts);
}
