import * as fs from "node:fs";
import * as path from "node:path";
import { fileURLToPath } from "node:url";

import { describe, expect, it } from "vitest";

import { BACKBONE_NAMES, getBackbone } from "../src/backbones.js";
import { DependencyError } from "../src/types.js";

const EXPECTED: Record<string, number> = {
  megnet: 32,
  m3gnet: 64,
  "mace-mp0-small": 128,
  "mace-mp0-large": 256,
  "mace-off23-small": 96,
  "mace-off23-large": 224,
};

describe("backbone registry", () => {
  it("covers exactly the six supported backbones", () => {
    expect([...BACKBONE_NAMES].sort()).toEqual(Object.keys(EXPECTED).sort());
  });

  it.each(Object.entries(EXPECTED))("%s has dimension %d", (name, dim) => {
    expect(getBackbone(name).expectedDimension).toBe(dim);
  });

  it("rejects unknown backbones with an actionable message", () => {
    expect(() => getBackbone("schnet")).toThrow(DependencyError);
    expect(() => getBackbone("schnet")).toThrow(/supported backbones/);
  });

  it("matches the pinned lockfile", () => {
    const here = path.dirname(fileURLToPath(import.meta.url));
    const lock = JSON.parse(
      fs.readFileSync(path.join(here, "..", "backbones.lock.json"), "utf8"),
    );
    for (const name of BACKBONE_NAMES) {
      const spec = getBackbone(name);
      expect(lock.backbones[name].dimension).toBe(spec.expectedDimension);
      expect(lock.backbones[name].seed).toBe(spec.seed);
    }
  });
});
