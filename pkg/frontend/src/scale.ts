/** Linear scales with conventional 1-2-5 tick steps. */

export interface LinearScale {
  (value: number): number;
  domain: [number, number];
  range: [number, number];
  ticks(count?: number): number[];
}

export function linear(domain: [number, number], range: [number, number]): LinearScale {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  const span = d1 - d0 || 1;
  const scale = ((value: number) => r0 + ((value - d0) / span) * (r1 - r0)) as LinearScale;
  scale.domain = [d0, d1];
  scale.range = [r0, r1];
  scale.ticks = (count = 5) => ticks(d0, d1, count);
  return scale;
}

export function tickStep(lo: number, hi: number, count: number): number {
  const raw = Math.abs(hi - lo) / Math.max(1, count);
  const power = Math.floor(Math.log10(raw));
  const base = 10 ** power;
  const err = raw / base;
  if (err >= 7.5) return base * 10;
  if (err >= 3.5) return base * 5;
  if (err >= 1.5) return base * 2;
  return base;
}

export function ticks(lo: number, hi: number, count = 5): number[] {
  if (lo === hi) return [lo];
  const step = tickStep(lo, hi, count);
  const start = Math.ceil(lo / step) * step;
  const out: number[] = [];
  for (let v = start; v <= hi + step * 1e-9; v += step) {
    // snap away float drift so tick labels stay clean
    out.push(Number(v.toFixed(10)));
  }
  return out;
}

/** Pad a data extent so points sit inside the frame; handles empty input. */
export function paddedExtent(values: number[], fallback: [number, number], pad = 0.08): [number, number] {
  if (values.length === 0) return fallback;
  let lo = Math.min(...values);
  let hi = Math.max(...values);
  if (lo === hi) {
    lo -= Math.abs(lo) * 0.5 + 0.5;
    hi += Math.abs(hi) * 0.5 + 0.5;
  }
  const span = hi - lo;
  return [lo - span * pad, hi + span * pad];
}
