/** Spec -> figure: load every referenced CSV column and render the SVG. */
import { readSeriesColumn } from "./csv.js";
import { PlotSpec } from "./plotspec.js";
import { Curve, renderFigure } from "./svg.js";

export function renderSpec(spec: PlotSpec): string {
  const curves: Curve[] = spec.series.map((s) => {
    const { times, values } = readSeriesColumn(s.file, s.column);
    return { label: s.label, style: s.style, times, values };
  });
  return renderFigure(curves, {
    title: spec.title,
    inset: spec.inset,
    xRange: spec.xRange,
    yRange: spec.yRange,
  });
}
