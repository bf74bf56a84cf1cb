/** Linear and base-10 log scales with tick generation, DOM-free. */

export interface Scale {
  toPixel(value: number): number;
  ticks(): number[];
  domain: [number, number];
}

export function linearScale(
  domain: [number, number],
  range: [number, number],
): Scale {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  const span = d1 - d0 || 1;
  return {
    domain,
    toPixel: (v) => r0 + ((v - d0) / span) * (r1 - r0),
    ticks: () => niceTicks(d0, d1, 6),
  };
}

export function logScale(
  domain: [number, number],
  range: [number, number],
): Scale {
  if (domain[0] <= 0 || domain[1] <= 0) {
    throw new Error("log scale requires a positive domain");
  }
  const l0 = Math.log10(domain[0]);
  const l1 = Math.log10(domain[1]);
  const span = l1 - l0 || 1;
  const [r0, r1] = range;
  return {
    domain,
    toPixel: (v) => r0 + ((Math.log10(v) - l0) / span) * (r1 - r0),
    ticks: () => {
      const out: number[] = [];
      for (let e = Math.ceil(l0); e <= Math.floor(l1); e++) out.push(10 ** e);
      // few decades: fall back to the domain edges so axes stay labelled
      return out.length >= 2 ? out : [domain[0], domain[1]];
    },
  };
}

/** Round tick positions at 1/2/5 x 10^k covering [lo, hi]. */
export function niceTicks(lo: number, hi: number, target: number): number[] {
  const span = hi - lo || 1;
  const raw = span / Math.max(target - 1, 1);
  const mag = 10 ** Math.floor(Math.log10(raw));
  const residual = raw / mag;
  const step = residual > 5 ? 10 * mag : residual > 2 ? 5 * mag : residual > 1 ? 2 * mag : mag;
  const out: number[] = [];
  for (let v = Math.ceil(lo / step) * step; v <= hi + step * 1e-9; v += step) {
    out.push(Math.abs(v) < step * 1e-9 ? 0 : v);
  }
  return out;
}

export function formatTick(v: number): string {
  if (v === 0) return "0";
  const abs = Math.abs(v);
  if (abs >= 10000 || abs < 0.001) {
    const exp = Math.floor(Math.log10(abs));
    const mant = v / 10 ** exp;
    const m = Math.abs(mant - 1) < 1e-9 ? "" : `${Number(mant.toFixed(2))}x`;
    return `${m}1e${exp}`;
  }
  return `${Number(v.toPrecision(4))}`;
}
