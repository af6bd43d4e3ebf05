"""Train a Gaussian-kernel shielding model on synthetic data and predict.

Walks the full round trip: build a labeled dataset, fit kernel ridge
regression, save the model to disk, reload it, and compare batch predictions
against the held-out targets. Run with:

    python3 demos/train_and_predict.py
"""

import tempfile
from pathlib import Path

import numpy as np

from shiftkernel import krr
from shiftkernel.data import (
    AtomSample,
    LabeledDataset,
    Nucleus,
    SplitSpec,
    split,
)
from shiftkernel.evaluation import compute_metrics, to_shift
from shiftkernel.kernels import KernelConfig


def synthetic_dataset(n=400, d=6, seed=0):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(n, d))
    sigmas = 150.0 + 25.0 * np.sin(X[:, :3].sum(axis=1)) + 0.5 * rng.normal(size=n)
    samples = [
        AtomSample(f"mol{i // 8:04d}", i % 8, 6, X[i]) for i in range(n)
    ]
    return LabeledDataset(
        dimension=d, nucleus=Nucleus.from_label("13C"), samples=samples, sigmas=sigmas
    )


def main():
    data = synthetic_dataset()
    train, test = split(data, SplitSpec(seed=1, test_count=80))
    print(f"train {len(train)} atoms, test {len(test)} atoms, dimension {data.dimension}")

    cfg = KernelConfig(kind="gaussian", gamma=0.1)
    model = krr.fit(train, cfg, lam=1e-6)
    print(f"fitted: kernel={cfg.kind} gamma={cfg.gamma} lambda={model.lam}")

    with tempfile.TemporaryDirectory() as tmp:
        path = Path(tmp) / "carbon.skrr"
        krr.save_model(model, path)
        reloaded = krr.load_model(path)
        print(f"saved and reloaded model ({path.stat().st_size} bytes)")

    pred = krr.predict_batch(reloaded, test.descriptor_matrix())
    report = compute_metrics(pred, test.sigmas)
    print(f"test MAE  {report.mae:8.4f} ppm")
    print(f"test RMSE {report.rmse:8.4f} ppm")
    print(f"test MaxAE {report.maxae:7.4f} ppm")

    sigma_hat = float(pred[0])
    delta_hat = to_shift(sigma_hat, reloaded.nucleus)
    print(f"first test atom: shielding {sigma_hat:.3f} ppm -> shift {delta_hat:.3f} ppm")


if __name__ == "__main__":
    main()
