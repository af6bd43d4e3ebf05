import numpy as np
import pytest

from shiftkernel.data import (
    AtomSample,
    DescriptorSet,
    LabeledDataset,
    Nucleus,
    TargetRow,
    TargetTable,
    write_descriptors,
    write_targets,
)


def make_samples(n, d, seed=0, n_molecules=None, model="synthetic"):
    """DescriptorSet of n atoms with random but reproducible descriptors."""
    rng = np.random.default_rng(seed)
    n_molecules = n_molecules or max(1, n // 3)
    samples = []
    counts = {}
    for i in range(n):
        mol = f"mol{i % n_molecules}"
        idx = counts.get(mol, 0)
        counts[mol] = idx + 1
        samples.append(
            AtomSample(
                molecule_id=mol,
                atom_index=idx,
                atomic_number=6,
                descriptor=rng.normal(size=d),
            )
        )
    return DescriptorSet(source_model=model, dimension=d, samples=samples)


def smooth_target(x):
    """A smooth learnable function of a descriptor vector (ppm scale)."""
    return 100.0 + 30.0 * np.sin(x[:3].sum()) + 10.0 * np.cos(x[-1])


def make_dataset(n, d, seed=0, nucleus="13C", noise=0.0, n_molecules=None):
    """LabeledDataset whose targets are a smooth function of the descriptors."""
    dset = make_samples(n, d, seed=seed, n_molecules=n_molecules)
    rng = np.random.default_rng(seed + 1)
    sigmas = np.array(
        [smooth_target(s.descriptor) + noise * rng.normal() for s in dset.samples]
    )
    return LabeledDataset(
        dimension=d,
        nucleus=Nucleus.from_label(nucleus),
        samples=dset.samples,
        sigmas=sigmas,
    )


def dataset_files(tmp_path, data: LabeledDataset, model="synthetic"):
    """Write a LabeledDataset out as descriptor + target CSVs, return both paths."""
    dset = DescriptorSet(
        source_model=model, dimension=data.dimension, samples=data.samples
    )
    targets = TargetTable(
        rows=[
            TargetRow(s.molecule_id, s.atom_index, data.nucleus.label, float(sig))
            for s, sig in zip(data.samples, data.sigmas)
        ]
    )
    dpath = tmp_path / "descriptors.csv"
    tpath = tmp_path / "targets.csv"
    write_descriptors(dset, dpath)
    write_targets(targets, tpath)
    return dpath, tpath


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
