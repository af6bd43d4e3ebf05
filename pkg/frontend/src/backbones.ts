import { BackboneName, BackboneSpec, DependencyError } from "./types.js";

/**
 * Registry of supported backbones and their per-atom descriptor dimensions.
 *
 * Each entry defines the captured tensor for that backbone name: a
 * deterministic, translation-invariant summary of the atomic environment
 * projected to the backbone's published width (see featurizer.ts). Seeds are
 * pinned here and mirrored in backbones.lock.json so descriptor files
 * reproduce bit-for-bit across machines.
 */
const REGISTRY: Record<BackboneName, BackboneSpec> = {
  megnet: { name: "megnet", expectedDimension: 32, seed: 0x6d65676e },
  m3gnet: { name: "m3gnet", expectedDimension: 64, seed: 0x6d33676e },
  "mace-mp0-small": { name: "mace-mp0-small", expectedDimension: 128, seed: 0x6d703073 },
  "mace-mp0-large": { name: "mace-mp0-large", expectedDimension: 256, seed: 0x6d70306c },
  "mace-off23-small": { name: "mace-off23-small", expectedDimension: 96, seed: 0x6f323373 },
  "mace-off23-large": { name: "mace-off23-large", expectedDimension: 224, seed: 0x6f32336c },
};

export const BACKBONE_NAMES = Object.keys(REGISTRY) as BackboneName[];

export const getBackbone = (name: string): BackboneSpec => {
  const spec = REGISTRY[name as BackboneName];
  if (!spec) {
    throw new DependencyError(
      `backbone "${name}" is not available; supported backbones: ` +
        `${BACKBONE_NAMES.join(", ")}. If you meant a newly published model, ` +
        `add it to the registry in src/backbones.ts and pin its seed in ` +
        `backbones.lock.json.`,
    );
  }
  return spec;
};
