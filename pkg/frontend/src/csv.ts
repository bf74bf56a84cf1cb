/**
 * Readers for the simulator's two CSV schemas.
 *
 * Trace files:  time_tau,mean_fidelity,std_error,n_runs
 * Bounds files: time_tau,eq5_bound,eq6_bound,eq7_bound,eq3_approx,
 *               eq8_approx,parec_rate_pred,embedded_rate_pred
 */
import { readFileSync } from "node:fs";
import Papa from "papaparse";

export const TRACE_COLUMNS = [
  "time_tau",
  "mean_fidelity",
  "std_error",
  "n_runs",
] as const;

export const BOUNDS_COLUMNS = [
  "time_tau",
  "eq5_bound",
  "eq6_bound",
  "eq7_bound",
  "eq3_approx",
  "eq8_approx",
  "parec_rate_pred",
  "embedded_rate_pred",
] as const;

export interface Table {
  /** column name -> values, all rows finite numbers */
  columns: Map<string, number[]>;
  nRows: number;
}

export class CsvSchemaError extends Error {}

function parseNumericCsv(path: string, expected: readonly string[]): Table {
  let text: string;
  try {
    text = readFileSync(path, "utf-8");
  } catch (err) {
    throw new CsvSchemaError(`cannot read ${path}: ${String(err)}`);
  }
  const parsed = Papa.parse<Record<string, number>>(text, {
    header: true,
    dynamicTyping: true,
    skipEmptyLines: true,
  });
  if (parsed.errors.length > 0) {
    const first = parsed.errors[0];
    throw new CsvSchemaError(`${path}: ${first.message} (row ${first.row})`);
  }
  const fields = parsed.meta.fields ?? [];
  if (
    fields.length !== expected.length ||
    expected.some((name, i) => fields[i] !== name)
  ) {
    throw new CsvSchemaError(
      `${path}: header [${fields.join(",")}] does not match schema [${expected.join(",")}]`,
    );
  }
  if (parsed.data.length === 0) {
    throw new CsvSchemaError(`${path}: no data rows`);
  }
  const columns = new Map<string, number[]>();
  for (const name of expected) {
    const values = parsed.data.map((row) => row[name]);
    if (values.some((v) => typeof v !== "number" || !Number.isFinite(v))) {
      throw new CsvSchemaError(`${path}: non-numeric entry in column ${name}`);
    }
    columns.set(name, values as number[]);
  }
  return { columns, nRows: parsed.data.length };
}

export function readTraceCsv(path: string): Table {
  return parseNumericCsv(path, TRACE_COLUMNS);
}

export function readBoundsCsv(path: string): Table {
  return parseNumericCsv(path, BOUNDS_COLUMNS);
}

/** Columns a plot series may reference, per schema. */
export function readSeriesColumn(
  path: string,
  column: string | undefined,
): { times: number[]; values: number[] } {
  const isBounds = column !== undefined && column !== "mean_fidelity";
  const table = isBounds ? readBoundsCsv(path) : readTraceCsv(path);
  const wanted = column ?? "mean_fidelity";
  const values = table.columns.get(wanted);
  if (!values) {
    throw new CsvSchemaError(`${path}: no column ${wanted} in schema`);
  }
  return { times: table.columns.get("time_tau")!, values };
}
