import numpy as np
import pytest

from shiftkernel import krr
from shiftkernel.errors import ConfigError, SizeError
from shiftkernel.kernels import KernelConfig
from shiftkernel.model_selection import (
    SearchSpace,
    cv_score,
    grid_search,
    kfold_indices,
    random_search,
    write_trial_log,
)
from conftest import make_dataset

GAU = KernelConfig(kind="gaussian", gamma=0.3)


class TestKfold:
    def test_even_split(self):
        folds = kfold_indices(10, 5, seed=0)
        assert [len(f) for f in folds] == [2] * 5

    def test_remainder_rule(self):
        folds = kfold_indices(10, 3, seed=0)
        assert sorted(len(f) for f in folds) == [3, 3, 4]
        assert len(folds[0]) == 4

    def test_partition_property(self, rng):
        for _ in range(20):
            n = int(rng.integers(4, 100))
            k = int(rng.integers(2, n + 1))
            folds = kfold_indices(n, k, seed=int(rng.integers(1 << 30)))
            joined = np.concatenate(folds)
            assert sorted(joined.tolist()) == list(range(n))

    def test_deterministic(self):
        a = kfold_indices(30, 4, seed=9)
        b = kfold_indices(30, 4, seed=9)
        assert all(np.array_equal(x, y) for x, y in zip(a, b))

    def test_k_too_large(self):
        with pytest.raises(SizeError):
            kfold_indices(3, 4, seed=0)


class TestCvScore:
    def test_self_consistent_targets(self):
        # Every held-out point has an exact duplicate (same descriptor and
        # target) inside the training complement, so a near-interpolating fit
        # reproduces the fold targets.
        data = make_dataset(20, 3, seed=0)
        samples = [data.samples[i % 4] for i in range(20)]
        sigmas = np.array([data.sigmas[i % 4] for i in range(20)])
        from shiftkernel.data import LabeledDataset

        dup = LabeledDataset(dimension=3, nucleus=data.nucleus, samples=samples, sigmas=sigmas)
        mae, _ = cv_score(dup, GAU, 1e-10, k=5, seed=1)
        assert mae <= 1e-6

    def test_matches_reference_cv_loop(self):
        data = make_dataset(50, 4, seed=2, noise=1.0)
        k, seed, lam = 5, 7, 1e-3
        mae, fold_maes = cv_score(data, GAU, lam, k=k, seed=seed)
        folds = kfold_indices(50, k, seed)
        ref_maes = []
        for fold in folds:
            train_idx = [i for i in range(50) if i not in set(fold.tolist())]
            model = krr.fit(data.take(train_idx), GAU, lam)
            test = data.take(fold.tolist())
            pred = np.array([krr.predict(model, x) for x in test.descriptor_matrix()])
            ref_maes.append(np.mean(np.abs(pred - test.sigmas)))
        assert abs(mae - np.mean(ref_maes)) <= 1e-10
        assert np.max(np.abs(np.array(fold_maes) - ref_maes)) <= 1e-10

    def test_leave_one_out(self):
        data = make_dataset(10, 3, seed=3)
        mae, fold_maes = cv_score(data, GAU, 1e-4, k=10, seed=0)
        assert np.isfinite(mae)
        assert len(fold_maes) == 10

    def test_mean_of_folds(self):
        data = make_dataset(30, 3, seed=4, noise=0.5)
        mae, fold_maes = cv_score(data, GAU, 1e-3, k=3, seed=0)
        assert mae == pytest.approx(np.mean(fold_maes), abs=1e-15)


class TestRandomSearch:
    def test_single_trial(self):
        data = make_dataset(20, 3, seed=5)
        best, log = random_search(data, SearchSpace(trials=1, seed=0), k=4)
        assert len(log) == 1
        assert best is log[0]

    def test_deterministic(self):
        data = make_dataset(20, 3, seed=5)
        space = SearchSpace(trials=5, seed=11)
        b1, l1 = random_search(data, space, k=4)
        b2, l2 = random_search(data, space, k=4)
        assert [r.hyperparameters for r in l1] == [r.hyperparameters for r in l2]
        assert b1.trial == b2.trial and b1.cv_mae == b2.cv_mae

    def test_best_not_worse_than_median(self):
        data = make_dataset(40, 3, seed=6, noise=0.5)
        best, log = random_search(data, SearchSpace(trials=20, seed=3), k=4)
        assert best.cv_mae <= np.median([r.cv_mae for r in log])

    def test_quantum_searches_lambda_only(self):
        data = make_dataset(12, 4, seed=7)
        cfg = KernelConfig(kind="quantum", qubits=3, scale=1.0, repetitions=2)
        best, log = random_search(data, SearchSpace(trials=3, seed=1), k=3, cfg_template=cfg)
        for r in log:
            assert r.hyperparameters["gamma"] is None
            assert r.hyperparameters["c"] == 1.0
            assert r.hyperparameters["R"] == 2

    def test_invalid_space(self):
        with pytest.raises(ConfigError):
            SearchSpace(gamma_range=(0.0, 1.0))
        with pytest.raises(ConfigError):
            SearchSpace(trials=0)


class TestGridSearch:
    def test_one_by_one_grid(self):
        data = make_dataset(12, 4, seed=8)
        space = SearchSpace(trials=2, seed=0)
        best, outer = grid_search(data, [1.0], [2], space, k=3, n_qubits=3)
        assert len(outer) == 1
        assert best.hyperparameters["c"] == 1.0 and best.hyperparameters["R"] == 2

    def test_two_by_two_grid_exhaustive(self):
        data = make_dataset(12, 4, seed=8)
        space = SearchSpace(trials=1, seed=0)
        best, outer = grid_search(data, [0.5, 1.5], [1, 2], space, k=3, n_qubits=3)
        assert len(outer) == 4
        assert {(r.hyperparameters["c"], r.hyperparameters["R"]) for r in outer} == {
            (0.5, 1),
            (0.5, 2),
            (1.5, 1),
            (1.5, 2),
        }

    def test_best_is_argmin_of_log(self):
        data = make_dataset(12, 4, seed=9)
        space = SearchSpace(trials=1, seed=0)
        best, outer = grid_search(data, [0.5, 1.5], [1, 2], space, k=3, n_qubits=3)
        assert best.cv_mae == min(r.cv_mae for r in outer)

    def test_empty_grid(self):
        data = make_dataset(12, 4, seed=9)
        with pytest.raises(ConfigError):
            grid_search(data, [], [1], SearchSpace(trials=1), k=3)


def test_trial_log_csv(tmp_path):
    data = make_dataset(20, 3, seed=10)
    best, log = random_search(data, SearchSpace(trials=3, seed=2), k=4)
    path = tmp_path / "trials.csv"
    write_trial_log(log, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "trial,gamma,lambda,c,R,cv_mae,wall_time_s"
    assert len(lines) == 4
