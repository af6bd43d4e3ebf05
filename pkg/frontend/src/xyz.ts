import { Atom, MoleculeGeometry, ParseError } from "./types.js";

const SYMBOL_TO_Z: Record<string, number> = {
  H: 1, He: 2, Li: 3, Be: 4, B: 5, C: 6, N: 7, O: 8, F: 9, Ne: 10,
  Na: 11, Mg: 12, Al: 13, Si: 14, P: 15, S: 16, Cl: 17, Ar: 18, K: 19,
  Ca: 20, Sc: 21, Ti: 22, V: 23, Cr: 24, Mn: 25, Fe: 26, Co: 27, Ni: 28,
  Cu: 29, Zn: 30, Ga: 31, Ge: 32, As: 33, Se: 34, Br: 35, Kr: 36, I: 53,
};

const atomicNumber = (token: string, line: number): number => {
  if (/^\d+$/.test(token)) {
    const z = Number.parseInt(token, 10);
    if (z < 1) throw new ParseError(`line ${line}: atomic number must be >= 1`);
    return z;
  }
  const z = SYMBOL_TO_Z[token];
  if (!z) throw new ParseError(`line ${line}: unknown element symbol "${token}"`);
  return z;
};

/** molecule_id from the comment line: a `molecule_id=...` key if present,
 * otherwise the whole trimmed line, otherwise a positional fallback. */
const moleculeIdFrom = (comment: string, index: number): string => {
  const match = comment.match(/(?:^|\s)molecule_id=(\S+)/);
  if (match) return match[1];
  const trimmed = comment.trim();
  return trimmed.length > 0 ? trimmed : `molecule-${index}`;
};

/**
 * Parse an (extended) XYZ file, possibly holding several concatenated
 * molecules. The comment line carries the molecule id.
 */
export const parseXyz = (text: string): MoleculeGeometry[] => {
  const lines = text.replace(/\r\n?/g, "\n").split("\n");
  const molecules: MoleculeGeometry[] = [];
  let cursor = 0;
  while (cursor < lines.length) {
    if (lines[cursor].trim() === "") {
      cursor += 1;
      continue;
    }
    const countLine = cursor + 1;
    const count = Number.parseInt(lines[cursor].trim(), 10);
    if (!Number.isFinite(count) || count < 1) {
      throw new ParseError(`line ${countLine}: expected a positive atom count`);
    }
    if (cursor + 1 + count >= lines.length + 1) {
      throw new ParseError(`line ${countLine}: file truncated before ${count} atoms`);
    }
    const comment = lines[cursor + 1] ?? "";
    const atoms: Atom[] = [];
    for (let i = 0; i < count; i += 1) {
      const lineNo = cursor + 3 + i;
      const raw = lines[cursor + 2 + i];
      if (raw === undefined) {
        throw new ParseError(`line ${lineNo}: missing atom record`);
      }
      const tokens = raw.trim().split(/\s+/);
      if (tokens.length < 4) {
        throw new ParseError(`line ${lineNo}: expected "symbol x y z"`);
      }
      const coords = tokens.slice(1, 4).map(Number.parseFloat) as [number, number, number];
      if (coords.some((v) => !Number.isFinite(v))) {
        throw new ParseError(`line ${lineNo}: non-finite coordinate`);
      }
      atoms.push({ z: atomicNumber(tokens[0], lineNo), position: coords });
    }
    molecules.push({
      moleculeId: moleculeIdFrom(comment, molecules.length),
      atoms,
    });
    cursor += 2 + count;
  }
  if (molecules.length === 0) {
    throw new ParseError("no molecules found in XYZ input");
  }
  return molecules;
};
