"""Learning curve with per-size hyperparameter tuning.

Subsamples growing training sets from a pool, tunes (gamma, lambda) by
seeded random search with k-fold cross-validation at each size, and reports
how the holdout MAE falls as the training set grows. Run with:

    python3 demos/learning_curve.py
"""

import numpy as np

from shiftkernel.data import AtomSample, LabeledDataset, Nucleus, SplitSpec, split
from shiftkernel.evaluation import learning_curve
from shiftkernel.kernels import KernelConfig
from shiftkernel.model_selection import SearchSpace


def synthetic_dataset(n=1200, d=4, seed=3):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(n, d))
    sigmas = 120.0 + 30.0 * np.sin(X[:, :3].sum(axis=1)) + 0.3 * rng.normal(size=n)
    samples = [AtomSample(f"mol{i // 6:04d}", i % 6, 6, X[i]) for i in range(n)]
    return LabeledDataset(
        dimension=d, nucleus=Nucleus.from_label("13C"), samples=samples, sigmas=sigmas
    )


def main():
    data = synthetic_dataset()
    pool, holdout = split(data, SplitSpec(seed=0, test_count=200))
    sizes = [100, 200, 400, 800]
    space = SearchSpace(trials=25, seed=5)
    cfg = KernelConfig(kind="laplacian", gamma=1.0)

    rows = learning_curve(pool, sizes, holdout, cfg, space, seed=7)

    print(f"{'size':>6} {'MAE (ppm)':>10} {'gamma':>12} {'lambda':>12}")
    for row in rows:
        hp = row.hyperparameters
        print(
            f"{row.train_size:>6} {row.test_mae:>10.4f} "
            f"{hp['gamma']:>12.3e} {hp['lambda']:>12.3e}"
        )
    ratio = rows[0].test_mae / rows[-1].test_mae
    print(f"\nMAE improved {ratio:.1f}x from {sizes[0]} to {sizes[-1]} samples")


if __name__ == "__main__":
    main()
