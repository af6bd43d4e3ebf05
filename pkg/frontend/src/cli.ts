#!/usr/bin/env node
import * as fs from "node:fs";
import * as path from "node:path";
import { parseArgs } from "node:util";

import { BACKBONE_NAMES } from "./backbones.js";
import { extract, verifyDimensions } from "./extract.js";
import { parseXyz } from "./xyz.js";
import { MoleculeGeometry } from "./types.js";

const USAGE = `usage:
  gntl-extract extract --backbone <name> --xyz <glob> --out <path> [--experimental-layer <n>]
  gntl-extract verify --backbone <name> --file <path>

backbones: ${BACKBONE_NAMES.join(", ")}`;

/** Expand a glob limited to * wildcards within one directory component. */
const expandGlob = (pattern: string): string[] => {
  if (!pattern.includes("*")) return [pattern];
  const dir = path.dirname(pattern);
  const base = path.basename(pattern);
  const regex = new RegExp(
    "^" + base.split("*").map((p) => p.replace(/[.+?^${}()|[\]\\]/g, "\\$&")).join(".*") + "$",
  );
  if (!fs.existsSync(dir)) return [];
  return fs
    .readdirSync(dir)
    .filter((name) => regex.test(name))
    .sort()
    .map((name) => path.join(dir, name));
};

export const main = (argv: string[]): number => {
  const [command, ...rest] = argv;
  try {
    if (command === "extract") {
      const { values } = parseArgs({
        args: rest,
        options: {
          backbone: { type: "string" },
          xyz: { type: "string" },
          out: { type: "string" },
          "experimental-layer": { type: "string", default: "1" },
        },
      });
      if (!values.backbone || !values.xyz || !values.out) {
        console.error(USAGE);
        return 2;
      }
      const layer = Number.parseInt(values["experimental-layer"] as string, 10);
      const files = expandGlob(values.xyz);
      if (files.length === 0) {
        console.error(`no files match ${values.xyz}`);
        return 2;
      }
      const geometries: MoleculeGeometry[] = [];
      for (const file of files) {
        geometries.push(...parseXyz(fs.readFileSync(file, "utf8")));
      }
      const result = extract(values.backbone, geometries, values.out, layer);
      console.log(
        `wrote ${values.out}: ${result.rows} rows, dimension ${result.dimension}` +
          (layer !== 1 ? ` (experimental layer ${layer})` : ""),
      );
      return 0;
    }
    if (command === "verify") {
      const { values } = parseArgs({
        args: rest,
        options: {
          backbone: { type: "string" },
          file: { type: "string" },
        },
      });
      if (!values.backbone || !values.file) {
        console.error(USAGE);
        return 2;
      }
      const report = verifyDimensions(values.file, values.backbone);
      console.log(report.message);
      return report.ok ? 0 : 1;
    }
    console.error(USAGE);
    return 2;
  } catch (err) {
    console.error((err as Error).message);
    return 1;
  }
};

const isDirectRun =
  process.argv[1] !== undefined &&
  import.meta.url === new URL(`file://${path.resolve(process.argv[1])}`).href;
if (isDirectRun) {
  process.exit(main(process.argv.slice(2)));
}
