/** Plot specification: which curves to draw, from which files, how. */
import { readFileSync } from "node:fs";
import path from "node:path";

export interface SeriesSpec {
  /** trace or bounds CSV, resolved relative to the spec file */
  file: string;
  label: string;
  style: "solid" | "dashed";
  /** bounds-CSV column; omitted for trace files (mean_fidelity) */
  column?: string;
}

export interface PlotSpec {
  title?: string;
  series: SeriesSpec[];
  inset: boolean;
  xRange?: [number, number];
  yRange?: [number, number];
}

export class PlotSpecError extends Error {}

function asRange(value: unknown, name: string): [number, number] | undefined {
  if (value === undefined) return undefined;
  if (
    !Array.isArray(value) ||
    value.length !== 2 ||
    value.some((v) => typeof v !== "number") ||
    value[0] >= value[1]
  ) {
    throw new PlotSpecError(`${name} must be [lo, hi] with lo < hi`);
  }
  return [value[0], value[1]];
}

export function loadPlotSpec(specPath: string): PlotSpec {
  let raw: unknown;
  try {
    raw = JSON.parse(readFileSync(specPath, "utf-8"));
  } catch (err) {
    throw new PlotSpecError(`cannot load ${specPath}: ${String(err)}`);
  }
  const obj = raw as Record<string, unknown>;
  if (!Array.isArray(obj.series) || obj.series.length === 0) {
    throw new PlotSpecError("spec needs a non-empty series list");
  }
  const base = path.dirname(specPath);
  const series: SeriesSpec[] = obj.series.map((entry, i) => {
    const s = entry as Record<string, unknown>;
    if (typeof s.file !== "string") {
      throw new PlotSpecError(`series[${i}]: missing file`);
    }
    const style = s.style ?? "solid";
    if (style !== "solid" && style !== "dashed") {
      throw new PlotSpecError(`series[${i}]: style must be solid or dashed`);
    }
    if (s.column !== undefined && typeof s.column !== "string") {
      throw new PlotSpecError(`series[${i}]: column must be a string`);
    }
    return {
      file: path.resolve(base, s.file),
      label: typeof s.label === "string" ? s.label : path.basename(s.file),
      style,
      column: s.column as string | undefined,
    };
  });
  return {
    title: typeof obj.title === "string" ? obj.title : undefined,
    series,
    inset: obj.inset === true,
    xRange: asRange(obj.x_range, "x_range"),
    yRange: asRange(obj.y_range, "y_range"),
  };
}
