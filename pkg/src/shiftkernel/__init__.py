"""shiftkernel: kernel ridge regression for atom-level NMR shielding prediction.

Classical (Laplacian/Gaussian) and quantum-fidelity kernels over precomputed
per-atom descriptors, plus the splitting, tuning and evaluation protocol
around them.
"""

from .data import (
    AtomSample,
    DescriptorSet,
    LabeledDataset,
    Nucleus,
    SplitSpec,
    TargetTable,
    join,
    load_descriptors,
    load_targets,
    sample_subset,
    split,
    write_descriptors,
    write_targets,
)
from .evaluation import MetricsReport, ShiftRecord, compute_metrics, evaluate_external, learning_curve, to_shift
from .kernels import GramMatrix, KernelConfig, cross_gram, eval_pair, gram
from .krr import KrrModel, fit, load_model, predict, predict_batch, save_model
from .model_selection import SearchSpace, TrialResult, cv_score, grid_search, kfold_indices, random_search
from .qkernel import EmbeddingSpec, FeatureScaler, embed, fit_scaler, qgram, qkernel_pair
from .statevector import Circuit, Gate, Statevector, apply, fidelity, init_zero, run

__version__ = "0.1.0"
