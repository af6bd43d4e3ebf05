import * as fs from "node:fs";
import * as path from "node:path";

import { ExtractionError, ParseError } from "./types.js";

export const GNTL_MAGIC = "#gntl-v1";

export interface DescriptorRow {
  moleculeId: string;
  atomIndex: number;
  atomicNumber: number;
  values: Float64Array;
}

/** %.17g-style rendering: 17 significant digits, trailing zeros trimmed.
 * Guarantees exact float64 round-trip through the downstream parser. */
export const g17 = (v: number): string => {
  if (!Number.isFinite(v)) {
    throw new ExtractionError(`non-finite descriptor value ${v}`);
  }
  if (Number.isInteger(v) && Math.abs(v) < 1e17) return v.toFixed(0);
  let s = v.toPrecision(17);
  if (s.includes("e")) {
    const [mantissa, exp] = s.split("e");
    const trimmed = mantissa.includes(".")
      ? mantissa.replace(/0+$/, "").replace(/\.$/, "")
      : mantissa;
    return `${trimmed}e${exp}`;
  }
  if (s.includes(".")) {
    s = s.replace(/0+$/, "").replace(/\.$/, "");
  }
  return s;
};

/** Write rows as a descriptor CSV the regression package loads directly. */
export const writeDescriptors = (
  rows: DescriptorRow[],
  dimension: number,
  modelName: string,
  outPath: string,
): void => {
  const lines: string[] = [];
  lines.push(`${GNTL_MAGIC},model=${modelName},dim=${dimension}`);
  const cols = ["molecule_id", "atom_index", "atomic_number"];
  for (let i = 0; i < dimension; i += 1) cols.push(`d${i}`);
  lines.push(cols.join(","));
  for (const row of rows) {
    if (row.values.length !== dimension) {
      throw new ExtractionError(
        `row for ${row.moleculeId}#${row.atomIndex} has ${row.values.length} ` +
          `components, manifest says ${dimension}`,
      );
    }
    const cells = [row.moleculeId, String(row.atomIndex), String(row.atomicNumber)];
    for (const v of row.values) cells.push(g17(v));
    lines.push(cells.join(","));
  }
  const dir = path.dirname(outPath);
  if (dir && !fs.existsSync(dir)) fs.mkdirSync(dir, { recursive: true });
  fs.writeFileSync(outPath, lines.join("\n") + "\n", "utf8");
};

export interface ManifestInfo {
  model: string;
  dimension: number;
  rowCount: number;
}

/** Read back just enough of a descriptor file to check its manifest. */
export const readManifest = (filePath: string): ManifestInfo => {
  const text = fs.readFileSync(filePath, "utf8");
  const lines = text.split("\n");
  if (lines.length === 0 || !lines[0].startsWith(`${GNTL_MAGIC},`)) {
    throw new ParseError(`${filePath}:1: missing "${GNTL_MAGIC}" header`);
  }
  const fields = new Map<string, string>();
  for (const part of lines[0].slice(GNTL_MAGIC.length + 1).split(",")) {
    const eq = part.indexOf("=");
    if (eq > 0) fields.set(part.slice(0, eq), part.slice(eq + 1));
  }
  const model = fields.get("model");
  const dimRaw = fields.get("dim");
  if (!model || !dimRaw) {
    throw new ParseError(`${filePath}:1: header must declare model=<name>,dim=<D>`);
  }
  const dimension = Number.parseInt(dimRaw, 10);
  if (!Number.isFinite(dimension) || dimension < 1) {
    throw new ParseError(`${filePath}:1: dim=${dimRaw} is not a positive integer`);
  }
  let rowCount = 0;
  for (let i = 2; i < lines.length; i += 1) {
    const line = lines[i];
    if (line.trim() === "") continue;
    const nCells = line.split(",").length;
    if (nCells !== 3 + dimension) {
      throw new ParseError(
        `${filePath}:${i + 1}: expected ${3 + dimension} fields, found ${nCells}`,
      );
    }
    rowCount += 1;
  }
  return { model, dimension, rowCount };
};
