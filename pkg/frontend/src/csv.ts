/**
 * Convergence-table CSV schema shared with the solver CLI.
 *
 * Header (exact): h,dofs,energy_err,dg_err,l2_err,eoc_energy,eoc_l2,
 * assemble_ms,solve_ms. The eoc_* cells are empty on the first row;
 * floats carry 17 significant digits.
 */

import Papa from "papaparse";

export const CSV_HEADER = [
  "h",
  "dofs",
  "energy_err",
  "dg_err",
  "l2_err",
  "eoc_energy",
  "eoc_l2",
  "assemble_ms",
  "solve_ms",
] as const;

export type ColumnName = (typeof CSV_HEADER)[number];

export interface ConvergenceRow {
  h: number;
  dofs: number;
  energy_err: number;
  dg_err: number;
  l2_err: number;
  eoc_energy: number | null;
  eoc_l2: number | null;
  assemble_ms: number;
  solve_ms: number;
}

export class SchemaError extends Error {}

function parseCell(name: ColumnName, text: string): number | null {
  if (text === "") {
    if (name === "eoc_energy" || name === "eoc_l2") return null;
    throw new SchemaError(`empty cell in required column ${name}`);
  }
  const value = Number(text);
  if (!Number.isFinite(value)) {
    throw new SchemaError(`non-numeric cell '${text}' in column ${name}`);
  }
  return value;
}

/** Parse CSV text into rows, validating the exact header and cell types. */
export function parseTable(text: string): ConvergenceRow[] {
  const parsed = Papa.parse<string[]>(text.trim(), { skipEmptyLines: true });
  if (parsed.errors.length > 0) {
    throw new SchemaError(`CSV parse error: ${parsed.errors[0].message}`);
  }
  const rows = parsed.data;
  if (rows.length === 0) {
    throw new SchemaError("empty CSV");
  }
  const header = rows[0];
  if (header.join(",") !== CSV_HEADER.join(",")) {
    throw new SchemaError(`unexpected header '${header.join(",")}'`);
  }
  const out: ConvergenceRow[] = [];
  for (const cells of rows.slice(1)) {
    if (cells.length !== CSV_HEADER.length) {
      throw new SchemaError(`row has ${cells.length} cells, expected ${CSV_HEADER.length}`);
    }
    const rec: Record<string, number | null> = {};
    CSV_HEADER.forEach((name, i) => {
      rec[name] = parseCell(name, cells[i]);
    });
    out.push(rec as unknown as ConvergenceRow);
  }
  if (out.length === 0) {
    throw new SchemaError("CSV holds no data rows");
  }
  for (let i = 1; i < out.length; i++) {
    if (!(out[i].h < out[i - 1].h)) {
      throw new SchemaError("mesh sizes must decrease strictly");
    }
  }
  return out;
}

/** 17 significant digits, matching the solver's float format. */
function fmt(value: number | null): string {
  if (value === null) return "";
  if (Number.isInteger(value) && Math.abs(value) < 2 ** 53) {
    return String(value);
  }
  return value.toPrecision(17).replace(/\.?0+($|e)/, "$1");
}

/** Serialize rows back to the schema; integer columns stay integers. */
export function writeTable(rows: ConvergenceRow[]): string {
  const lines = [CSV_HEADER.join(",")];
  for (const row of rows) {
    lines.push(CSV_HEADER.map((name) => fmt(row[name])).join(","));
  }
  return lines.join("\n") + "\n";
}
