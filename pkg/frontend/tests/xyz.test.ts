import { describe, expect, it } from "vitest";

import { parseXyz } from "../src/xyz.js";
import { ParseError } from "../src/types.js";

const WATER = `3
molecule_id=water-001
O 0.000000 0.000000 0.117300
H 0.000000 0.757200 -0.469200
H 0.000000 -0.757200 -0.469200
`;

describe("parseXyz", () => {
  it("parses a single molecule with a molecule_id key", () => {
    const mols = parseXyz(WATER);
    expect(mols).toHaveLength(1);
    expect(mols[0].moleculeId).toBe("water-001");
    expect(mols[0].atoms).toHaveLength(3);
    expect(mols[0].atoms[0].z).toBe(8);
    expect(mols[0].atoms[1].position[1]).toBeCloseTo(0.7572, 10);
  });

  it("parses concatenated molecules in order", () => {
    const two = WATER + "2\nmolecule_id=hydrogen\nH 0 0 0\nH 0 0 0.74\n";
    const mols = parseXyz(two);
    expect(mols.map((m) => m.moleculeId)).toEqual(["water-001", "hydrogen"]);
    expect(mols[1].atoms.map((a) => a.z)).toEqual([1, 1]);
  });

  it("uses the whole comment line when no key is present", () => {
    const mols = parseXyz("1\nmethane fragment\nC 0 0 0\n");
    expect(mols[0].moleculeId).toBe("methane fragment");
  });

  it("falls back to a positional id for empty comments", () => {
    const mols = parseXyz("1\n\nC 0 0 0\n");
    expect(mols[0].moleculeId).toBe("molecule-0");
  });

  it("accepts atomic numbers in the symbol column", () => {
    const mols = parseXyz("1\nx\n6 0 0 0\n");
    expect(mols[0].atoms[0].z).toBe(6);
  });

  it("rejects truncated files", () => {
    expect(() => parseXyz("3\nx\nC 0 0 0\n")).toThrow(ParseError);
  });

  it("rejects unknown element symbols", () => {
    expect(() => parseXyz("1\nx\nXx 0 0 0\n")).toThrow(/unknown element/);
  });

  it("rejects non-finite coordinates", () => {
    expect(() => parseXyz("1\nx\nC 0 zero 0\n")).toThrow(/non-finite/);
  });

  it("rejects empty input", () => {
    expect(() => parseXyz("\n\n")).toThrow(/no molecules/);
  });
});
