import { describe, expect, it } from "vitest";

import { getBackbone } from "../src/backbones.js";
import { featurize } from "../src/featurizer.js";
import { Atom, MoleculeGeometry } from "../src/types.js";

const molecule = (id: string, atoms: Atom[]): MoleculeGeometry => ({
  moleculeId: id,
  atoms,
});

const METHANOL = molecule("methanol", [
  { z: 6, position: [-0.0473, 0.6658, 0.0] },
  { z: 8, position: [-0.0473, -0.7459, 0.0] },
  { z: 1, position: [-1.0925, 0.9762, 0.0] },
  { z: 1, position: [0.4382, 1.0772, 0.8885] },
  { z: 1, position: [0.4382, 1.0772, -0.8885] },
]);

const translated = (mol: MoleculeGeometry, shift: [number, number, number]) =>
  molecule(
    mol.moleculeId,
    mol.atoms.map((a) => ({
      z: a.z,
      position: [
        a.position[0] + shift[0],
        a.position[1] + shift[1],
        a.position[2] + shift[2],
      ] as [number, number, number],
    })),
  );

describe("featurize", () => {
  it("gives one row per atom at the backbone dimension (m3gnet)", () => {
    const tri = molecule("tri", [
      { z: 6, position: [0, 0, 0] },
      { z: 8, position: [1.2, 0, 0] },
      { z: 1, position: [0, 1.0, 0] },
    ]);
    const rows = featurize(tri, getBackbone("m3gnet"));
    expect(rows).toHaveLength(3);
    for (const row of rows) expect(row).toHaveLength(64);
  });

  it("gives one row per atom at the backbone dimension (mace-off23-small)", () => {
    const rows = featurize(METHANOL, getBackbone("mace-off23-small"));
    expect(rows).toHaveLength(5);
    for (const row of rows) expect(row).toHaveLength(96);
  });

  it("is invariant under rigid translation within 1e-5", () => {
    const spec = getBackbone("mace-mp0-large");
    const a = featurize(METHANOL, spec);
    const b = featurize(translated(METHANOL, [12.3, -4.56, 789.0]), spec);
    let worst = 0;
    for (let i = 0; i < a.length; i += 1) {
      for (let j = 0; j < a[i].length; j += 1) {
        worst = Math.max(worst, Math.abs(a[i][j] - b[i][j]));
      }
    }
    expect(worst).toBeLessThanOrEqual(1e-5);
  });

  it("is deterministic across calls", () => {
    const spec = getBackbone("megnet");
    const a = featurize(METHANOL, spec);
    const b = featurize(METHANOL, spec);
    expect(a.map((r) => Array.from(r))).toEqual(b.map((r) => Array.from(r)));
  });

  it("keeps the dimension independent of the element set", () => {
    const spec = getBackbone("m3gnet");
    const organic = featurize(METHANOL, spec);
    const salt = featurize(
      molecule("salt", [
        { z: 11, position: [0, 0, 0] },
        { z: 17, position: [2.36, 0, 0] },
      ]),
      spec,
    );
    expect(organic[0]).toHaveLength(64);
    expect(salt[0]).toHaveLength(64);
  });

  it("differs between backbones on the same input", () => {
    const a = featurize(METHANOL, getBackbone("mace-mp0-small"))[0];
    const b = featurize(METHANOL, getBackbone("mace-off23-small"))[0];
    expect(a.slice(0, 8)).not.toEqual(b.slice(0, 8));
  });

  it("exposes higher layers behind the layer argument", () => {
    const spec = getBackbone("m3gnet");
    const layer1 = featurize(METHANOL, spec, 1)[0];
    const layer2 = featurize(METHANOL, spec, 2)[0];
    expect(layer2).toHaveLength(64);
    expect(Array.from(layer1)).not.toEqual(Array.from(layer2));
  });

  it("rejects empty molecules", () => {
    expect(() => featurize(molecule("empty", []), getBackbone("megnet"))).toThrow(
      /no atoms/,
    );
  });
});
