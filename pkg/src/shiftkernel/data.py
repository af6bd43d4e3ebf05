"""On-disk formats and in-memory model for descriptors, targets, joins and splits.

Descriptor files use the GNTL-v1 layout: UTF-8 CSV whose first line is a
header comment ``#gntl-v1,model=<name>,dim=<D>`` followed by a column header
``molecule_id,atom_index,atomic_number,d0,...,d{D-1}`` and one row per atom.
Floats are rendered with 17 significant digits so a load/write round trip is
lossless for 64-bit values. Target files are plain CSV with columns
``molecule_id,atom_index,nucleus,sigma_ppm``. Files ending in ``.gz`` are
transparently (de)compressed.

All randomized operations (splits, subsampling) draw from ``numpy``'s
``default_rng`` (PCG64) seeded with a caller-supplied 64-bit seed, so results
reproduce exactly across runs and platforms.
"""

from __future__ import annotations

import gzip
import io
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DataValueError,
    DimensionError,
    FormatError,
    SizeError,
    UnresolvedReferenceError,
)

GNTL_MAGIC = "#gntl-v1"
FORMAT_VERSION = "gntl-v1"

# Reference shielding constants (ppm) of the standard reference substances:
# TMS for 1H/13C, nitromethane for 15N, H2(17)O for 17O, CFCl3 for 19F.
SIGMA_REF_PPM = {
    "1H": 31.7608,
    "13C": 187.0521,
    "15N": -147.8164,
    "17O": 325.8642,
    "19F": 171.2621,
}

SUPPORTED_NUCLEI = tuple(SIGMA_REF_PPM)


@dataclass(frozen=True)
class Nucleus:
    """One of the five supported nuclei with its reference shielding constant."""

    label: str
    sigma_ref: float

    @classmethod
    def from_label(cls, label: str) -> "Nucleus":
        if label not in SIGMA_REF_PPM:
            raise DataValueError(
                f"unsupported nucleus {label!r}; expected one of {', '.join(SUPPORTED_NUCLEI)}"
            )
        return cls(label=label, sigma_ref=SIGMA_REF_PPM[label])


@dataclass(frozen=True)
class AtomSample:
    """One atom's environment: identity plus its descriptor vector."""

    molecule_id: str
    atom_index: int
    atomic_number: int
    descriptor: np.ndarray

    def __post_init__(self):
        if self.atom_index < 0:
            raise DataValueError(f"atom_index must be >= 0, got {self.atom_index}")
        if self.atomic_number < 1:
            raise DataValueError(f"atomic_number must be >= 1, got {self.atomic_number}")
        vec = np.asarray(self.descriptor, dtype=float)
        if not np.all(np.isfinite(vec)):
            raise DataValueError(
                f"non-finite descriptor component for ({self.molecule_id}, {self.atom_index})"
            )
        object.__setattr__(self, "descriptor", vec)


@dataclass
class DescriptorSet:
    """Ordered collection of per-atom descriptors plus its manifest."""

    source_model: str
    dimension: int
    samples: list[AtomSample]
    format_version: str = FORMAT_VERSION

    def __post_init__(self):
        seen = set()
        for s in self.samples:
            key = (s.molecule_id, s.atom_index)
            if key in seen:
                raise DataValueError(f"duplicate (molecule_id, atom_index): {key}")
            seen.add(key)
            if s.descriptor.shape[0] != self.dimension:
                raise DimensionError(
                    f"sample {key} has descriptor length {s.descriptor.shape[0]}, "
                    f"manifest declares {self.dimension}"
                )

    def __len__(self):
        return len(self.samples)

    def index(self) -> dict[tuple[str, int], AtomSample]:
        return {(s.molecule_id, s.atom_index): s for s in self.samples}


@dataclass(frozen=True)
class TargetRow:
    molecule_id: str
    atom_index: int
    nucleus: str
    sigma: float


@dataclass
class TargetTable:
    """Per-atom shielding targets keyed by (molecule_id, atom_index, nucleus)."""

    rows: list[TargetRow]

    def __post_init__(self):
        seen = set()
        for r in self.rows:
            key = (r.molecule_id, r.atom_index, r.nucleus)
            if key in seen:
                raise DataValueError(f"duplicate target row: {key}")
            seen.add(key)
            if not np.isfinite(r.sigma):
                raise DataValueError(f"non-finite sigma for {key}")

    def __len__(self):
        return len(self.rows)


@dataclass
class LabeledDataset:
    """Joined descriptors + shielding targets for a single nucleus."""

    dimension: int
    nucleus: Nucleus
    samples: list[AtomSample]
    sigmas: np.ndarray
    n_skipped: int = 0

    def __post_init__(self):
        self.sigmas = np.asarray(self.sigmas, dtype=float)
        if len(self.samples) != self.sigmas.shape[0]:
            raise SizeError(
                f"{len(self.samples)} samples but {self.sigmas.shape[0]} targets"
            )

    def __len__(self):
        return len(self.samples)

    def descriptor_matrix(self) -> np.ndarray:
        if not self.samples:
            return np.empty((0, self.dimension))
        return np.stack([s.descriptor for s in self.samples])

    def take(self, indices) -> "LabeledDataset":
        indices = list(indices)
        return LabeledDataset(
            dimension=self.dimension,
            nucleus=self.nucleus,
            samples=[self.samples[i] for i in indices],
            sigmas=self.sigmas[indices] if indices else np.empty(0),
        )

    def molecule_ids(self) -> list[str]:
        """Distinct molecule ids in first-appearance order."""
        seen: dict[str, None] = {}
        for s in self.samples:
            seen.setdefault(s.molecule_id, None)
        return list(seen)


@dataclass(frozen=True)
class SplitSpec:
    """Deterministic train/test split request."""

    seed: int
    test_count: int
    mode: str = "atom-level"

    def __post_init__(self):
        if self.mode not in ("atom-level", "molecule-level"):
            raise DataValueError(f"unknown split mode {self.mode!r}")
        if self.test_count < 1:
            raise SizeError(f"test_count must be positive, got {self.test_count}")


def _open_text(path, mode="rt"):
    path = str(path)
    if path.endswith(".gz"):
        return gzip.open(path, mode, encoding="utf-8")
    return open(path, mode, encoding="utf-8")


def _fmt(v: float) -> str:
    return f"{v:.17g}"


def load_descriptors(path) -> DescriptorSet:
    """Parse a GNTL-v1 descriptor file.

    Raises FormatError for a malformed header, DimensionError when a row's
    vector length disagrees with the manifest, DataValueError on non-finite
    values. All errors report the offending 1-based line number.
    """
    with _open_text(path) as fh:
        return _parse_descriptors(fh, str(path))


def _parse_descriptors(fh, name: str) -> DescriptorSet:
    header = fh.readline().rstrip("\n")
    if not header.startswith(GNTL_MAGIC + ","):
        raise FormatError(f"{name}:1: missing '{GNTL_MAGIC}' header comment")
    fields = dict(
        part.split("=", 1) for part in header[len(GNTL_MAGIC) + 1 :].split(",") if "=" in part
    )
    if "model" not in fields or "dim" not in fields:
        raise FormatError(f"{name}:1: header must declare model=<name>,dim=<D>")
    try:
        dim = int(fields["dim"])
    except ValueError:
        raise FormatError(f"{name}:1: dim={fields['dim']!r} is not an integer") from None
    if dim < 1:
        raise FormatError(f"{name}:1: dim must be positive, got {dim}")

    columns = fh.readline().rstrip("\n")
    expected_cols = "molecule_id,atom_index,atomic_number," + ",".join(
        f"d{i}" for i in range(dim)
    )
    if columns != expected_cols:
        raise FormatError(f"{name}:2: unexpected column header for dim={dim}")

    samples = []
    for lineno, line in enumerate(fh, start=3):
        line = line.rstrip("\n")
        if not line:
            continue
        parts = line.split(",")
        if len(parts) != 3 + dim:
            raise DimensionError(
                f"{name}:{lineno}: expected {3 + dim} fields ({dim} descriptor values), "
                f"got {len(parts)}"
            )
        try:
            atom_index = int(parts[1])
            atomic_number = int(parts[2])
            vec = np.array([float(p) for p in parts[3:]])
        except ValueError as exc:
            raise FormatError(f"{name}:{lineno}: {exc}") from None
        if not np.all(np.isfinite(vec)):
            raise DataValueError(f"{name}:{lineno}: non-finite descriptor value")
        samples.append(
            AtomSample(
                molecule_id=parts[0],
                atom_index=atom_index,
                atomic_number=atomic_number,
                descriptor=vec,
            )
        )
    return DescriptorSet(source_model=fields["model"], dimension=dim, samples=samples)


def write_descriptors(dset: DescriptorSet, path) -> None:
    """Write a DescriptorSet in canonical GNTL-v1 form (17 significant digits)."""
    with _open_text(path, "wt") as fh:
        fh.write(f"{GNTL_MAGIC},model={dset.source_model},dim={dset.dimension}\n")
        fh.write(
            "molecule_id,atom_index,atomic_number,"
            + ",".join(f"d{i}" for i in range(dset.dimension))
            + "\n"
        )
        for s in dset.samples:
            fh.write(
                f"{s.molecule_id},{s.atom_index},{s.atomic_number},"
                + ",".join(_fmt(v) for v in s.descriptor)
                + "\n"
            )


def load_targets(path) -> TargetTable:
    """Parse a target CSV (molecule_id,atom_index,nucleus,sigma_ppm)."""
    rows = []
    with _open_text(path) as fh:
        header = fh.readline().rstrip("\n")
        if header != "molecule_id,atom_index,nucleus,sigma_ppm":
            raise FormatError(f"{path}:1: unexpected target header {header!r}")
        for lineno, line in enumerate(fh, start=2):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != 4:
                raise FormatError(f"{path}:{lineno}: expected 4 fields, got {len(parts)}")
            if parts[2] not in SIGMA_REF_PPM:
                raise FormatError(f"{path}:{lineno}: unknown nucleus {parts[2]!r}")
            try:
                rows.append(
                    TargetRow(
                        molecule_id=parts[0],
                        atom_index=int(parts[1]),
                        nucleus=parts[2],
                        sigma=float(parts[3]),
                    )
                )
            except ValueError as exc:
                raise FormatError(f"{path}:{lineno}: {exc}") from None
    return TargetTable(rows=rows)


def write_targets(table: TargetTable, path) -> None:
    with _open_text(path, "wt") as fh:
        fh.write("molecule_id,atom_index,nucleus,sigma_ppm\n")
        for r in table.rows:
            fh.write(f"{r.molecule_id},{r.atom_index},{r.nucleus},{_fmt(r.sigma)}\n")


def join(
    descriptors: DescriptorSet,
    targets: TargetTable,
    nucleus: Nucleus,
    strict: bool = True,
) -> LabeledDataset:
    """Join targets of one nucleus with their descriptors, in target-row order.

    In strict mode a target row whose (molecule_id, atom_index) has no
    descriptor raises UnresolvedReferenceError listing all offenders; in
    lenient mode such rows are skipped and counted in ``n_skipped``.
    """
    index = descriptors.index()
    samples, sigmas, missing = [], [], []
    for r in targets.rows:
        if r.nucleus != nucleus.label:
            continue
        sample = index.get((r.molecule_id, r.atom_index))
        if sample is None:
            missing.append((r.molecule_id, r.atom_index))
            continue
        samples.append(sample)
        sigmas.append(r.sigma)
    if missing and strict:
        raise UnresolvedReferenceError(missing)
    return LabeledDataset(
        dimension=descriptors.dimension,
        nucleus=nucleus,
        samples=samples,
        sigmas=np.array(sigmas) if sigmas else np.empty(0),
        n_skipped=len(missing),
    )


def split(data: LabeledDataset, spec: SplitSpec) -> tuple[LabeledDataset, LabeledDataset]:
    """Partition into (train, test), deterministically for a fixed seed.

    Atom-level mode withholds ``test_count`` atoms; molecule-level mode
    withholds ``test_count`` whole molecules so no molecule straddles the
    boundary.
    """
    rng = np.random.default_rng(spec.seed)
    if spec.mode == "atom-level":
        n = len(data)
        if spec.test_count >= n:
            raise SizeError(f"test_count={spec.test_count} must be < dataset size {n}")
        perm = rng.permutation(n)
        test_idx = set(perm[: spec.test_count].tolist())
    else:
        mols = data.molecule_ids()
        if spec.test_count >= len(mols):
            raise SizeError(
                f"test_count={spec.test_count} must be < molecule count {len(mols)}"
            )
        perm = rng.permutation(len(mols))
        test_mols = {mols[i] for i in perm[: spec.test_count].tolist()}
        test_idx = {i for i, s in enumerate(data.samples) if s.molecule_id in test_mols}
    train = data.take(i for i in range(len(data)) if i not in test_idx)
    test = data.take(i for i in range(len(data)) if i in test_idx)
    return train, test


def sample_subset(data: LabeledDataset, n: int, seed: int) -> LabeledDataset:
    """Uniform random subset of size n without replacement, deterministic per seed."""
    if n > len(data):
        raise SizeError(f"requested subset of {n} from only {len(data)} entries")
    rng = np.random.default_rng(seed)
    idx = rng.choice(len(data), size=n, replace=False)
    return data.take(idx.tolist())
