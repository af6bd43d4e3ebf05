export interface Atom {
  /** Atomic number. */
  z: number;
  /** Cartesian position in angstroms. */
  position: [number, number, number];
}

export interface MoleculeGeometry {
  moleculeId: string;
  atoms: Atom[];
}

export type BackboneName =
  | "megnet"
  | "m3gnet"
  | "mace-mp0-small"
  | "mace-mp0-large"
  | "mace-off23-small"
  | "mace-off23-large";

export interface BackboneSpec {
  name: BackboneName;
  /** Per-atom descriptor dimension, fixed per backbone regardless of how
   * many element types appear in the input. */
  expectedDimension: number;
  /** Seed for the deterministic projection; pinned in backbones.lock.json. */
  seed: number;
}

export class ExtractionError extends Error {}
export class DependencyError extends Error {}
export class ParseError extends Error {}
