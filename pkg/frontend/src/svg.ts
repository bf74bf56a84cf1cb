/**
 * SVG figure rendering: fidelity against time on linear main axes, with an
 * optional log-log inset of the deficit 1 - f.  The deficit is computed
 * here, at plot time only, so persisted outputs stay raw fidelities.
 */
import { Scale, formatTick, linearScale, logScale } from "./scale.js";

export interface Curve {
  label: string;
  style: "solid" | "dashed";
  times: number[];
  values: number[];
}

export interface FigureOptions {
  title?: string;
  inset: boolean;
  xRange?: [number, number];
  yRange?: [number, number];
}

const WIDTH = 900;
const HEIGHT = 600;
const MARGIN = { left: 78, right: 24, top: 48, bottom: 58 };
const PALETTE = [
  "#1f77b4",
  "#d62728",
  "#2ca02c",
  "#9467bd",
  "#ff7f0e",
  "#8c564b",
  "#17becf",
  "#7f7f7f",
];

const esc = (s: string) =>
  s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");

// spread-free extrema; series can exceed the engine's argument limit
function arrMin(values: number[]): number {
  let out = Infinity;
  for (const v of values) if (v < out) out = v;
  return out;
}

function arrMax(values: number[]): number {
  let out = -Infinity;
  for (const v of values) if (v > out) out = v;
  return out;
}

function polyline(
  xs: number[],
  ys: number[],
  color: string,
  dashed: boolean,
  width = 1.8,
): string {
  const points = xs.map((x, i) => `${x.toFixed(2)},${ys[i].toFixed(2)}`).join(" ");
  const dash = dashed ? ' stroke-dasharray="9 6"' : "";
  return `<polyline fill="none" stroke="${color}" stroke-width="${width}"${dash} points="${points}"/>`;
}

const MAX_POINTS_PER_CURVE = 2000;

function clipCurve(
  curve: Curve,
  keep: (t: number, v: number) => boolean,
): Array<{ t: number; v: number }> {
  const kept = curve.times
    .map((t, i) => ({ t, v: curve.values[i] }))
    .filter(({ t, v }) => keep(t, v));
  // purely presentational thinning; always retains the last point
  if (kept.length <= MAX_POINTS_PER_CURVE) return kept;
  const stride = Math.ceil(kept.length / MAX_POINTS_PER_CURVE);
  const thin = kept.filter((_, i) => i % stride === 0);
  if (kept.length % stride !== 1) thin.push(kept[kept.length - 1]);
  return thin;
}

function axisFrame(x0: number, x1: number, y0: number, y1: number): string {
  return `<rect x="${x0}" y="${y1}" width="${x1 - x0}" height="${y0 - y1}" fill="white" stroke="#222" stroke-width="1"/>`;
}

function mainAxes(x: Scale, y: Scale, plot: { x0: number; x1: number; y0: number; y1: number }): string {
  const parts = [axisFrame(plot.x0, plot.x1, plot.y0, plot.y1)];
  for (const t of x.ticks()) {
    const px = x.toPixel(t);
    parts.push(`<line x1="${px}" y1="${plot.y0}" x2="${px}" y2="${plot.y0 + 6}" stroke="#222"/>`);
    parts.push(
      `<text x="${px}" y="${plot.y0 + 22}" text-anchor="middle" font-size="13">${formatTick(t)}</text>`,
    );
  }
  for (const t of y.ticks()) {
    const py = y.toPixel(t);
    parts.push(`<line x1="${plot.x0 - 6}" y1="${py}" x2="${plot.x0}" y2="${py}" stroke="#222"/>`);
    parts.push(
      `<text x="${plot.x0 - 10}" y="${py + 4}" text-anchor="end" font-size="13">${formatTick(t)}</text>`,
    );
  }
  parts.push(
    `<text x="${(plot.x0 + plot.x1) / 2}" y="${plot.y0 + 44}" text-anchor="middle" font-size="15">T / tau</text>`,
  );
  parts.push(
    `<text x="${plot.x0 - 58}" y="${(plot.y0 + plot.y1) / 2}" text-anchor="middle" font-size="15" transform="rotate(-90 ${plot.x0 - 58} ${(plot.y0 + plot.y1) / 2})">fidelity</text>`,
  );
  return parts.join("\n");
}

function renderInset(curves: Curve[]): string {
  // lower-left corner box; log-log deficit, positive values only
  const box = { x0: MARGIN.left + 56, x1: MARGIN.left + 296, y1: HEIGHT - MARGIN.bottom - 210, y0: HEIGHT - MARGIN.bottom - 26 };
  const points = curves.map((c) =>
    clipCurve(c, (t, v) => t > 0 && 1 - v > 0).map(({ t, v }) => ({ t, d: 1 - v })),
  );
  const all = points.flat();
  if (all.length === 0) return "";
  const tLo = arrMin(all.map((p) => p.t));
  const tHi = arrMax(all.map((p) => p.t));
  const dLo = arrMin(all.map((p) => p.d));
  const dHi = arrMax(all.map((p) => p.d));
  if (!(tHi > tLo) || !(dHi > dLo)) return "";
  const x = logScale([tLo, tHi], [box.x0, box.x1]);
  const y = logScale([dLo, dHi], [box.y0, box.y1]);
  const parts = [`<g class="inset">`, axisFrame(box.x0, box.x1, box.y0, box.y1)];
  for (const t of x.ticks()) {
    const px = x.toPixel(t);
    parts.push(`<line x1="${px}" y1="${box.y0}" x2="${px}" y2="${box.y0 + 4}" stroke="#222"/>`);
    parts.push(`<text x="${px}" y="${box.y0 + 15}" text-anchor="middle" font-size="10">${formatTick(t)}</text>`);
  }
  for (const t of y.ticks()) {
    const py = y.toPixel(t);
    parts.push(`<line x1="${box.x0 - 4}" y1="${py}" x2="${box.x0}" y2="${py}" stroke="#222"/>`);
    parts.push(`<text x="${box.x0 - 6}" y="${py + 3}" text-anchor="end" font-size="10">${formatTick(t)}</text>`);
  }
  parts.push(`<text x="${(box.x0 + box.x1) / 2}" y="${box.y1 - 6}" text-anchor="middle" font-size="11">1 - f (log-log)</text>`);
  curves.forEach((curve, i) => {
    const pts = points[i];
    if (pts.length < 2) return;
    parts.push(
      polyline(
        pts.map((p) => x.toPixel(p.t)),
        pts.map((p) => y.toPixel(p.d)),
        PALETTE[i % PALETTE.length],
        curve.style === "dashed",
        1.2,
      ),
    );
  });
  parts.push("</g>");
  return parts.join("\n");
}

export function renderFigure(curves: Curve[], options: FigureOptions): string {
  if (curves.length === 0) {
    throw new Error("nothing to plot: no curves");
  }
  const plot = {
    x0: MARGIN.left,
    x1: WIDTH - MARGIN.right,
    y0: HEIGHT - MARGIN.bottom,
    y1: MARGIN.top,
  };
  const xLo = options.xRange?.[0] ?? arrMin(curves.map((c) => arrMin(c.times)));
  const xHi = options.xRange?.[1] ?? arrMax(curves.map((c) => arrMax(c.times)));
  const yLo = options.yRange?.[0] ?? Math.max(0, arrMin(curves.map((c) => arrMin(c.values))));
  const yHi = options.yRange?.[1] ?? 1.0;
  const x = linearScale([xLo, xHi], [plot.x0, plot.x1]);
  const y = linearScale([yLo, yHi], [plot.y0, plot.y1]);

  const parts = [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" viewBox="0 0 ${WIDTH} ${HEIGHT}" font-family="Helvetica, Arial, sans-serif">`,
    `<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`,
    mainAxes(x, y, plot),
  ];
  if (options.title) {
    parts.push(
      `<text x="${WIDTH / 2}" y="${MARGIN.top - 18}" text-anchor="middle" font-size="17">${esc(options.title)}</text>`,
    );
  }
  curves.forEach((curve, i) => {
    const pts = clipCurve(curve, (t, v) => t >= xLo && t <= xHi && v >= yLo && v <= yHi);
    if (pts.length < 2) return;
    parts.push(
      `<g class="series" data-label="${esc(curve.label)}">` +
        polyline(
          pts.map((p) => x.toPixel(p.t)),
          pts.map((p) => y.toPixel(p.v)),
          PALETTE[i % PALETTE.length],
          curve.style === "dashed",
        ) +
        "</g>",
    );
  });
  // legend, top-right inside the frame
  const lx = plot.x1 - 240;
  let ly = plot.y1 + 16;
  parts.push(`<g class="legend">`);
  curves.forEach((curve, i) => {
    const color = PALETTE[i % PALETTE.length];
    const dash = curve.style === "dashed" ? ' stroke-dasharray="9 6"' : "";
    parts.push(`<line x1="${lx}" y1="${ly}" x2="${lx + 34}" y2="${ly}" stroke="${color}" stroke-width="2"${dash}/>`);
    parts.push(`<text x="${lx + 42}" y="${ly + 4}" font-size="13">${esc(curve.label)}</text>`);
    ly += 19;
  });
  parts.push("</g>");
  if (options.inset) {
    parts.push(renderInset(curves));
  }
  parts.push("</svg>");
  return parts.join("\n");
}
