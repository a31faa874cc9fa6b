/**
 * Readers for the solver's output artifacts: the per-step diagnostics CSV,
 * the small auxiliary CSVs (theta_limit, weakstrong) and the binary
 * snapshot format (magic NSCH0001, little-endian float64 arrays).
 */

import { readFileSync } from "node:fs";

export const DIAGNOSTICS_HEADER =
  "t,mass,E_total,E_kin,E_free,D_visc,D_chem,u_L2,grad_mu_L2," +
  "grad_mu_H1,phi_min,phi_max,sep_delta,stat_mu_residual,energy_defect";

export class ParseError extends Error {
  constructor(public readonly file: string, message: string) {
    super(`${file}: ${message}`);
  }
}

export interface Table {
  columns: string[];
  /** column name -> values, one entry per data row */
  data: Map<string, number[]>;
  rows: number;
}

/** Parse a comma-separated numeric table with a header row. */
export function readCsv(path: string, expectedHeader?: string): Table {
  let text: string;
  try {
    text = readFileSync(path, "utf8");
  } catch (err) {
    throw new ParseError(path, `cannot read file (${(err as Error).message})`);
  }
  const lines = text.split("\n").filter((l) => l.trim().length > 0);
  if (lines.length === 0) throw new ParseError(path, "empty file");
  const header = lines[0].trim();
  if (expectedHeader !== undefined && header !== expectedHeader) {
    throw new ParseError(path, `unexpected header ${JSON.stringify(header)}`);
  }
  const columns = header.split(",");
  const data = new Map<string, number[]>(columns.map((c) => [c, []]));
  for (let i = 1; i < lines.length; i++) {
    const parts = lines[i].split(",");
    if (parts.length !== columns.length) {
      throw new ParseError(path, `row ${i + 1} has ${parts.length} fields, expected ${columns.length}`);
    }
    for (let j = 0; j < columns.length; j++) {
      const v = Number(parts[j]);
      if (!Number.isFinite(v) && parts[j].trim() !== "inf" && parts[j].trim() !== "-inf") {
        if (Number.isNaN(v)) throw new ParseError(path, `row ${i + 1}, column ${columns[j]}: not a number (${parts[j]})`);
      }
      data.get(columns[j])!.push(v);
    }
  }
  return { columns, data, rows: lines.length - 1 };
}

export function readDiagnostics(path: string): Table {
  return readCsv(path, DIAGNOSTICS_HEADER);
}

export function column(table: Table, name: string, file: string): number[] {
  const col = table.data.get(name);
  if (col === undefined) throw new ParseError(file, `missing column ${name}`);
  return col;
}

const SNAPSHOT_MAGIC = "NSCH0001";

export interface Snapshot {
  nx: number;
  ny: number;
  t: number;
  /** row-major (x-fastest over y), length nx*ny */
  phi: Float64Array;
  mu: Float64Array;
  p: Float64Array;
  ux: Float64Array; // (nx+1) * ny
  uy: Float64Array; // nx * (ny+1)
}

export function readSnapshot(path: string): Snapshot {
  let buf: Buffer;
  try {
    buf = readFileSync(path);
  } catch (err) {
    throw new ParseError(path, `cannot read file (${(err as Error).message})`);
  }
  if (buf.length < 24 || buf.toString("latin1", 0, 8) !== SNAPSHOT_MAGIC) {
    throw new ParseError(path, "bad snapshot magic");
  }
  const view = new DataView(buf.buffer, buf.byteOffset, buf.byteLength);
  const nx = view.getUint32(8, true);
  const ny = view.getUint32(12, true);
  const t = view.getFloat64(16, true);
  const sizes: [keyof Snapshot, number][] = [
    ["phi", nx * ny],
    ["mu", nx * ny],
    ["p", nx * ny],
    ["ux", (nx + 1) * ny],
    ["uy", nx * (ny + 1)],
  ];
  const total = 24 + 8 * sizes.reduce((s, [, n]) => s + n, 0);
  if (buf.length !== total) {
    throw new ParseError(path, `snapshot length ${buf.length} != ${total}`);
  }
  const out: Partial<Snapshot> = { nx, ny, t };
  let off = 24;
  for (const [name, count] of sizes) {
    const arr = new Float64Array(count);
    for (let i = 0; i < count; i++) {
      arr[i] = view.getFloat64(off, true);
      off += 8;
    }
    (out as Record<string, unknown>)[name] = arr;
  }
  return out as Snapshot;
}
