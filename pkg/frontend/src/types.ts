/**
 * Plot-data document schema and validation.
 *
 * The document is produced by the mining pipeline: one scatter point per
 * classified indicator, per-indicator ln confidence-ratio lists for the
 * violins, capped raw-ratio samples for the swarms, and one geometric-mean
 * value per indicator for the bar panel.
 */

export const TIERS = ["High", "Moderate", "Low"] as const;
export type Tier = (typeof TIERS)[number];

export interface ScatterPoint {
  label: string;
  pic: number;
  acb: number;
  tier: Tier;
}

export interface Thresholds {
  pic: number;
  acb: number;
  histogram_highlight: number;
}

export interface PlotDataDocument {
  scatter: ScatterPoint[];
  violin: Record<string, number[]>;
  swarm: Record<string, number[]>;
  histogram: Record<string, number>;
  thresholds: Thresholds;
}

/** Validation failure that names the offending document section. */
export class DocumentError extends Error {
  constructor(
    public readonly section: string,
    detail: string,
  ) {
    super(`invalid plot data: section "${section}": ${detail}`);
  }
}

function isFiniteNumber(x: unknown): x is number {
  return typeof x === "number" && Number.isFinite(x);
}

function numberList(section: string, label: string, value: unknown): number[] {
  if (!Array.isArray(value) || value.some((v) => !isFiniteNumber(v))) {
    throw new DocumentError(section, `entry "${label}" must be a list of finite numbers`);
  }
  return value as number[];
}

export function validateDocument(raw: unknown): PlotDataDocument {
  if (raw === null || typeof raw !== "object") {
    throw new DocumentError("document", "top level must be an object");
  }
  const doc = raw as Record<string, unknown>;

  if (!Array.isArray(doc.scatter)) {
    throw new DocumentError("scatter", "must be an array");
  }
  const scatter: ScatterPoint[] = doc.scatter.map((p, i) => {
    if (p === null || typeof p !== "object") {
      throw new DocumentError("scatter", `point ${i} must be an object`);
    }
    const point = p as Record<string, unknown>;
    if (typeof point.label !== "string" || point.label === "") {
      throw new DocumentError("scatter", `point ${i} needs a non-empty label`);
    }
    if (!isFiniteNumber(point.pic) || point.pic < 0 || point.pic > 1) {
      throw new DocumentError("scatter", `point ${i} (${point.label}): pic must be in [0, 1]`);
    }
    if (!isFiniteNumber(point.acb) || point.acb <= 0) {
      throw new DocumentError("scatter", `point ${i} (${point.label}): acb must be positive`);
    }
    if (!TIERS.includes(point.tier as Tier)) {
      throw new DocumentError(
        "scatter",
        `point ${i} (${point.label}): tier must be one of ${TIERS.join(", ")}`,
      );
    }
    return point as unknown as ScatterPoint;
  });

  const sections = ["violin", "swarm", "histogram"] as const;
  for (const name of sections) {
    if (doc[name] === null || typeof doc[name] !== "object" || Array.isArray(doc[name])) {
      throw new DocumentError(name, "must be an object keyed by indicator label");
    }
  }
  const violin: Record<string, number[]> = {};
  for (const [label, values] of Object.entries(doc.violin as object)) {
    violin[label] = numberList("violin", label, values);
  }
  const swarm: Record<string, number[]> = {};
  for (const [label, values] of Object.entries(doc.swarm as object)) {
    const list = numberList("swarm", label, values);
    if (list.some((v) => v <= 0)) {
      throw new DocumentError("swarm", `entry "${label}" must hold positive ratios`);
    }
    swarm[label] = list;
  }
  const histogram: Record<string, number> = {};
  for (const [label, value] of Object.entries(doc.histogram as object)) {
    if (!isFiniteNumber(value) || value <= 0) {
      throw new DocumentError("histogram", `entry "${label}" must be a positive number`);
    }
    histogram[label] = value;
  }

  const t = doc.thresholds;
  if (t === null || typeof t !== "object") {
    throw new DocumentError("thresholds", "must be an object");
  }
  const th = t as Record<string, unknown>;
  for (const key of ["pic", "acb", "histogram_highlight"]) {
    if (!isFiniteNumber(th[key])) {
      throw new DocumentError("thresholds", `needs a finite "${key}" value`);
    }
  }

  // labels must agree across sections so the panels describe the same set
  const scatterLabels = scatter.map((p) => p.label);
  const histogramLabels = Object.keys(histogram);
  const sameSet =
    scatterLabels.length === histogramLabels.length &&
    scatterLabels.every((l) => l in histogram);
  if (!sameSet) {
    throw new DocumentError("histogram", "labels do not match the scatter section");
  }
  for (const [name, table] of [
    ["violin", violin],
    ["swarm", swarm],
  ] as const) {
    const labels = Object.keys(table);
    if (labels.length !== scatterLabels.length || !scatterLabels.every((l) => l in table)) {
      throw new DocumentError(name, "labels do not match the scatter section");
    }
  }

  return {
    scatter,
    violin,
    swarm,
    histogram,
    thresholds: th as unknown as Thresholds,
  };
}
