/** Readers for the CSV / JSON / flat-binary artifact formats. */

import { readFileSync } from "fs";
import type { FieldData, Manifest, Series } from "./types.js";

export class ArtifactError extends Error {}

function mustRead(path: string): Buffer {
  try {
    return readFileSync(path);
  } catch {
    throw new ArtifactError(`missing or unreadable artifact: ${path}`);
  }
}

export function readManifest(path: string): Manifest {
  const obj = JSON.parse(mustRead(path).toString("utf8"));
  if (!obj.params || !obj.derived || !obj.grid) {
    throw new ArtifactError(`not a run manifest: ${path}`);
  }
  return obj as Manifest;
}

export function readJson(path: string): any {
  return JSON.parse(mustRead(path).toString("utf8"));
}

export function readSeries(path: string): Series {
  const text = mustRead(path).toString("utf8").trim();
  const lines = text.split("\n");
  const header = lines[0].split(",");
  const cols: Record<string, number[]> = {};
  for (const name of header) cols[name] = [];
  for (const line of lines.slice(1)) {
    const cells = line.split(",");
    if (cells.length !== header.length) {
      throw new ArtifactError(`ragged series row in ${path}`);
    }
    header.forEach((name, i) => cols[name].push(Number(cells[i])));
  }
  for (const need of ["t", "l1", "linf", "supportRadius"]) {
    if (!(need in cols)) throw new ArtifactError(`series ${path} lacks column ${need}`);
  }
  return cols as unknown as Series;
}

/** Flat binary field: little-endian int64 dim, int64 cells, float64 dx,
 *  then cells^dim float64 values in C order. */
export function readFieldBin(path: string): FieldData {
  const buf = mustRead(path);
  if (buf.length < 24) throw new ArtifactError(`truncated field file: ${path}`);
  const dim = Number(buf.readBigInt64LE(0));
  const cells = Number(buf.readBigInt64LE(8));
  const dx = buf.readDoubleLE(16);
  const count = dim === 1 ? cells : cells * cells;
  if (buf.length < 24 + 8 * count) {
    throw new ArtifactError(`field file shorter than its header claims: ${path}`);
  }
  const values = new Float64Array(count);
  for (let i = 0; i < count; i++) values[i] = buf.readDoubleLE(24 + 8 * i);
  return { dim, cells, dx, extent: (cells * dx) / 2, values };
}

/** Field CSV: 1D "index,x,value"; 2D "i,j,x,y,value". */
export function readFieldCsv(path: string): FieldData {
  const lines = mustRead(path).toString("utf8").trim().split("\n");
  const header = lines[0];
  const rows = lines.slice(1).map((l) => l.split(","));
  if (header === "index,x,value") {
    const n = rows.length;
    const values = new Float64Array(n);
    for (const r of rows) values[Number(r[0])] = Number(r[2]);
    const dx = Number(rows[1][1]) - Number(rows[0][1]);
    return { dim: 1, cells: n, dx, extent: -(Number(rows[0][1]) - dx / 2), values };
  }
  if (header === "i,j,x,y,value") {
    const n = Number(rows[rows.length - 1][0]) + 1;
    const values = new Float64Array(n * n);
    for (const r of rows) values[Number(r[0]) * n + Number(r[1])] = Number(r[4]);
    const xs = rows.map((r) => Number(r[2]));
    const dx = (Math.max(...xs) - Math.min(...xs)) / (n - 1);
    return { dim: 2, cells: n, dx, extent: -(Math.min(...xs) - dx / 2), values };
  }
  throw new ArtifactError(`unrecognized field CSV header in ${path}: ${header}`);
}

export function readField(path: string): FieldData {
  return path.endsWith(".bin") ? readFieldBin(path) : readFieldCsv(path);
}
