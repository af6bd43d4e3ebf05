import { getBackbone } from "./backbones.js";
import { featurize } from "./featurizer.js";
import { DescriptorRow, readManifest, writeDescriptors } from "./gntl.js";
import { MoleculeGeometry } from "./types.js";

/**
 * Extract per-atom descriptors for all molecules and write one descriptor
 * CSV. Row order follows input order: molecules in sequence, atoms in their
 * file order within each molecule.
 */
export const extract = (
  backboneName: string,
  geometries: MoleculeGeometry[],
  outPath: string,
  layer = 1,
): { rows: number; dimension: number } => {
  const spec = getBackbone(backboneName);
  const rows: DescriptorRow[] = [];
  for (const molecule of geometries) {
    const features = featurize(molecule, spec, layer);
    features.forEach((values, atomIndex) => {
      rows.push({
        moleculeId: molecule.moleculeId,
        atomIndex,
        atomicNumber: molecule.atoms[atomIndex].z,
        values,
      });
    });
  }
  writeDescriptors(rows, spec.expectedDimension, spec.name, outPath);
  return { rows: rows.length, dimension: spec.expectedDimension };
};

export interface VerifyReport {
  ok: boolean;
  expected: number;
  found: number | null;
  rows: number;
  message: string;
}

/** Check a descriptor file's manifest dimension against a backbone's. */
export const verifyDimensions = (filePath: string, backboneName: string): VerifyReport => {
  const spec = getBackbone(backboneName);
  let manifest;
  try {
    manifest = readManifest(filePath);
  } catch (err) {
    return {
      ok: false,
      expected: spec.expectedDimension,
      found: null,
      rows: 0,
      message: `fail: ${(err as Error).message}`,
    };
  }
  if (manifest.dimension !== spec.expectedDimension) {
    return {
      ok: false,
      expected: spec.expectedDimension,
      found: manifest.dimension,
      rows: manifest.rowCount,
      message:
        `fail: ${backboneName} descriptors must have dimension ` +
        `${spec.expectedDimension}, file declares ${manifest.dimension}`,
    };
  }
  return {
    ok: true,
    expected: spec.expectedDimension,
    found: manifest.dimension,
    rows: manifest.rowCount,
    message: `pass: dimension ${manifest.dimension}, ${manifest.rowCount} rows`,
  };
};
