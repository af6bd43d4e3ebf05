import gzip

import numpy as np
import pytest

from shiftkernel.data import (
    AtomSample,
    DescriptorSet,
    Nucleus,
    SplitSpec,
    TargetRow,
    TargetTable,
    join,
    load_descriptors,
    load_targets,
    sample_subset,
    split,
    write_descriptors,
)
from shiftkernel.errors import (
    DataValueError,
    DimensionError,
    FormatError,
    SizeError,
    UnresolvedReferenceError,
)
from conftest import make_dataset, make_samples


def write_lines(path, lines):
    path.write_text("\n".join(lines) + "\n")


class TestLoadDescriptors:
    def test_two_row_file(self, tmp_path):
        p = tmp_path / "d.csv"
        write_lines(
            p,
            [
                "#gntl-v1,model=m3gnet,dim=3",
                "molecule_id,atom_index,atomic_number,d0,d1,d2",
                "m1,0,6,0.5,1.5,-2",
                "m1,1,1,0,0,0",
            ],
        )
        dset = load_descriptors(p)
        assert dset.dimension == 3
        assert dset.source_model == "m3gnet"
        assert len(dset) == 2
        assert np.allclose(dset.samples[0].descriptor, [0.5, 1.5, -2])

    def test_row_length_mismatch_reports_line(self, tmp_path):
        p = tmp_path / "d.csv"
        write_lines(
            p,
            [
                "#gntl-v1,model=x,dim=64",
                "molecule_id,atom_index,atomic_number," + ",".join(f"d{i}" for i in range(64)),
                "m1,0,6," + ",".join("0.1" for _ in range(63)),
            ],
        )
        with pytest.raises(DimensionError, match=":3:"):
            load_descriptors(p)

    def test_empty_body_is_valid(self, tmp_path):
        p = tmp_path / "d.csv"
        write_lines(
            p,
            [
                "#gntl-v1,model=x,dim=2",
                "molecule_id,atom_index,atomic_number,d0,d1",
            ],
        )
        assert len(load_descriptors(p)) == 0

    def test_missing_header(self, tmp_path):
        p = tmp_path / "d.csv"
        write_lines(p, ["molecule_id,atom_index,atomic_number,d0"])
        with pytest.raises(FormatError, match=":1:"):
            load_descriptors(p)

    def test_non_finite_value(self, tmp_path):
        p = tmp_path / "d.csv"
        write_lines(
            p,
            [
                "#gntl-v1,model=x,dim=1",
                "molecule_id,atom_index,atomic_number,d0",
                "m1,0,6,nan",
            ],
        )
        with pytest.raises(DataValueError, match=":3:"):
            load_descriptors(p)

    def test_gzip_round_trip(self, tmp_path):
        dset = make_samples(6, 4, seed=3)
        p = tmp_path / "d.csv.gz"
        write_descriptors(dset, p)
        with gzip.open(p, "rt") as fh:
            assert fh.readline().startswith("#gntl-v1")
        again = load_descriptors(p)
        assert len(again) == 6
        assert np.allclose(again.samples[2].descriptor, dset.samples[2].descriptor)

    def test_canonical_round_trip_is_byte_identical(self, tmp_path):
        dset = make_samples(10, 5, seed=7)
        p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
        write_descriptors(dset, p1)
        write_descriptors(load_descriptors(p1), p2)
        assert p1.read_bytes() == p2.read_bytes()


class TestNucleus:
    @pytest.mark.parametrize(
        "label,ref",
        [("1H", 31.7608), ("13C", 187.0521), ("15N", -147.8164), ("17O", 325.8642), ("19F", 171.2621)],
    )
    def test_reference_constants(self, label, ref):
        assert Nucleus.from_label(label).sigma_ref == ref

    def test_unknown_label(self):
        with pytest.raises(DataValueError):
            Nucleus.from_label("31P")


class TestJoin:
    def setup_method(self):
        self.dset = make_samples(3, 2, seed=1)
        keys = [(s.molecule_id, s.atom_index) for s in self.dset.samples]
        self.targets = TargetTable(
            rows=[
                TargetRow(keys[0][0], keys[0][1], "13C", 10.0),
                TargetRow(keys[1][0], keys[1][1], "13C", 20.0),
                TargetRow(keys[2][0], keys[2][1], "1H", 1.0),
            ]
        )

    def test_matching_rows(self):
        data = join(self.dset, self.targets, Nucleus.from_label("13C"))
        assert len(data) == 2
        assert data.sigmas.tolist() == [10.0, 20.0]

    def test_no_matches(self):
        data = join(self.dset, self.targets, Nucleus.from_label("19F"))
        assert len(data) == 0

    def test_strict_unknown_molecule(self):
        targets = TargetTable(rows=[TargetRow("ghost", 0, "13C", 5.0)])
        with pytest.raises(UnresolvedReferenceError, match="ghost"):
            join(self.dset, targets, Nucleus.from_label("13C"))

    def test_lenient_skips_and_counts(self):
        targets = TargetTable(
            rows=[
                TargetRow("ghost", 0, "13C", 5.0),
                TargetRow(self.dset.samples[0].molecule_id, self.dset.samples[0].atom_index, "13C", 7.0),
            ]
        )
        data = join(self.dset, targets, Nucleus.from_label("13C"), strict=False)
        assert len(data) == 1
        assert data.n_skipped == 1

    def test_join_order_stable(self):
        a = join(self.dset, self.targets, Nucleus.from_label("13C"))
        b = join(self.dset, self.targets, Nucleus.from_label("13C"))
        assert [s.molecule_id for s in a.samples] == [s.molecule_id for s in b.samples]
        assert np.array_equal(a.sigmas, b.sigmas)


class TestSplit:
    def test_sizes_and_disjoint(self):
        data = make_dataset(10, 3, seed=2)
        train, test = split(data, SplitSpec(seed=42, test_count=3))
        assert (len(train), len(test)) == (7, 3)
        train_keys = {(s.molecule_id, s.atom_index) for s in train.samples}
        test_keys = {(s.molecule_id, s.atom_index) for s in test.samples}
        assert not train_keys & test_keys
        assert len(train_keys | test_keys) == 10

    def test_deterministic(self):
        data = make_dataset(50, 3, seed=2)
        t1 = split(data, SplitSpec(seed=42, test_count=10))[1]
        t2 = split(data, SplitSpec(seed=42, test_count=10))[1]
        assert [(s.molecule_id, s.atom_index) for s in t1.samples] == [
            (s.molecule_id, s.atom_index) for s in t2.samples
        ]

    def test_molecule_level_grouping(self):
        data = make_dataset(12, 3, seed=5, n_molecules=4)
        train, test = split(data, SplitSpec(seed=1, test_count=1, mode="molecule-level"))
        assert len(test) == 3
        assert len({s.molecule_id for s in test.samples}) == 1
        assert {s.molecule_id for s in test.samples}.isdisjoint(
            {s.molecule_id for s in train.samples}
        )

    def test_molecule_level_never_straddles(self):
        data = make_dataset(30, 2, seed=9, n_molecules=7)
        for seed in range(5):
            train, test = split(data, SplitSpec(seed=seed, test_count=3, mode="molecule-level"))
            assert {s.molecule_id for s in train.samples}.isdisjoint(
                {s.molecule_id for s in test.samples}
            )

    def test_too_large(self):
        data = make_dataset(5, 2)
        with pytest.raises(SizeError):
            split(data, SplitSpec(seed=0, test_count=5))


class TestSampleSubset:
    def test_unique_subset(self):
        data = make_dataset(1000, 2, seed=0)
        sub = sample_subset(data, 100, seed=7)
        assert len(sub) == 100
        assert len({(s.molecule_id, s.atom_index) for s in sub.samples}) == 100

    def test_full_size_is_permutation(self):
        data = make_dataset(20, 2, seed=0)
        sub = sample_subset(data, 20, seed=3)
        assert {(s.molecule_id, s.atom_index) for s in sub.samples} == {
            (s.molecule_id, s.atom_index) for s in data.samples
        }

    def test_deterministic_per_seed(self):
        data = make_dataset(1000, 2, seed=0)
        a = sample_subset(data, 100, seed=7)
        b = sample_subset(data, 100, seed=7)
        assert [(s.molecule_id, s.atom_index) for s in a.samples] == [
            (s.molecule_id, s.atom_index) for s in b.samples
        ]

    def test_too_large(self):
        data = make_dataset(5, 2)
        with pytest.raises(SizeError):
            sample_subset(data, 6, seed=0)


def test_target_file_round_trip(tmp_path):
    data = make_dataset(8, 3, seed=4)
    from conftest import dataset_files

    dpath, tpath = dataset_files(tmp_path, data)
    table = load_targets(tpath)
    assert len(table) == 8
    assert table.rows[0].nucleus == "13C"


def test_duplicate_atom_rejected():
    s = AtomSample("m", 0, 6, np.zeros(2))
    with pytest.raises(DataValueError):
        DescriptorSet(source_model="x", dimension=2, samples=[s, s])
