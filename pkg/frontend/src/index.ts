export { parseXyz } from "./xyz.js";
export { BACKBONE_NAMES, getBackbone } from "./backbones.js";
export { featurize } from "./featurizer.js";
export { writeDescriptors, readManifest, g17, GNTL_MAGIC } from "./gntl.js";
export { extract, verifyDimensions } from "./extract.js";
export type { Atom, MoleculeGeometry, BackboneName, BackboneSpec } from "./types.js";
export { ExtractionError, DependencyError, ParseError } from "./types.js";
