import { BackboneSpec, ExtractionError, MoleculeGeometry } from "./types.js";

/**
 * Deterministic per-atom featurizer.
 *
 * The captured tensor for each backbone name is defined as: a radial-basis
 * summary of the atom's interatomic distance environment (optionally
 * element-weighted), concatenated with the atom's own element channels, then
 * passed through a fixed random projection and tanh to the backbone's
 * published width. The projection matrix is generated from the backbone's
 * pinned seed, so output is identical across machines and runs.
 *
 * Built only from pairwise distances and atomic numbers, the descriptor is
 * exactly invariant under rigid translation and rotation of the input
 * coordinates.
 */

const RADIAL_CENTERS: number[] = [];
for (let k = 0; k < 24; k += 1) {
  RADIAL_CENTERS.push(0.5 + (k * (6.0 - 0.5)) / 23);
}
const RADIAL_WIDTH = 0.5;
const BASE_DIMENSION = 2 * RADIAL_CENTERS.length + 3;

/** Small deterministic PRNG (mulberry32). */
const mulberry32 = (seed: number) => {
  let a = seed >>> 0;
  return (): number => {
    a = (a + 0x6d2b79f5) >>> 0;
    let t = a;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
};

/** Standard normal draws via Box-Muller on the seeded PRNG. */
const normalSource = (seed: number) => {
  const uniform = mulberry32(seed);
  return (): number => {
    const u = Math.max(uniform(), 1e-12);
    const v = uniform();
    return Math.sqrt(-2 * Math.log(u)) * Math.cos(2 * Math.PI * v);
  };
};

const projectionCache = new Map<string, Float64Array>();

/** Projection matrix (dimension x BASE_DIMENSION), row-major, cached. */
const projectionFor = (spec: BackboneSpec, layer: number): Float64Array => {
  const key = `${spec.name}:${layer}`;
  const cached = projectionCache.get(key);
  if (cached) return cached;
  const draw = normalSource(spec.seed + 0x9e3779b9 * layer);
  const w = new Float64Array(spec.expectedDimension * BASE_DIMENSION);
  const scale = 1 / Math.sqrt(BASE_DIMENSION);
  for (let i = 0; i < w.length; i += 1) {
    w[i] = draw() * scale;
  }
  projectionCache.set(key, w);
  return w;
};

const baseFeatures = (molecule: MoleculeGeometry, atomIndex: number): Float64Array => {
  const atom = molecule.atoms[atomIndex];
  const base = new Float64Array(BASE_DIMENSION);
  for (let j = 0; j < molecule.atoms.length; j += 1) {
    if (j === atomIndex) continue;
    const other = molecule.atoms[j];
    const dx = atom.position[0] - other.position[0];
    const dy = atom.position[1] - other.position[1];
    const dz = atom.position[2] - other.position[2];
    const dist = Math.sqrt(dx * dx + dy * dy + dz * dz);
    for (let k = 0; k < RADIAL_CENTERS.length; k += 1) {
      const delta = dist - RADIAL_CENTERS[k];
      const g = Math.exp(-(delta * delta) / (2 * RADIAL_WIDTH * RADIAL_WIDTH));
      base[k] += g;
      base[RADIAL_CENTERS.length + k] += (other.z / 10) * g;
    }
  }
  const off = 2 * RADIAL_CENTERS.length;
  base[off] = atom.z / 10;
  base[off + 1] = Math.sqrt(atom.z);
  base[off + 2] = 1.0;
  return base;
};

/**
 * Per-atom descriptors for one molecule: rows follow atom order, each row
 * has exactly spec.expectedDimension components.
 */
export const featurize = (
  molecule: MoleculeGeometry,
  spec: BackboneSpec,
  layer = 1,
): Float64Array[] => {
  if (molecule.atoms.length === 0) {
    throw new ExtractionError(`molecule ${molecule.moleculeId} has no atoms`);
  }
  if (layer < 1) {
    throw new ExtractionError(`layer must be >= 1, got ${layer}`);
  }
  const w = projectionFor(spec, layer);
  const d = spec.expectedDimension;
  const rows: Float64Array[] = [];
  for (let i = 0; i < molecule.atoms.length; i += 1) {
    const base = baseFeatures(molecule, i);
    const row = new Float64Array(d);
    for (let r = 0; r < d; r += 1) {
      let acc = 0;
      const offset = r * BASE_DIMENSION;
      for (let c = 0; c < BASE_DIMENSION; c += 1) {
        acc += w[offset + c] * base[c];
      }
      row[r] = Math.tanh(acc);
    }
    rows.push(row);
  }
  return rows;
};
