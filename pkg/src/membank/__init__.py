"""Associative memory-bank classification over CNN feature vectors.

Pipeline: per-class core patterns via K-means, Hebbian storage in a
Hopfield-style memory, recall by energy descent, and classification by
weight-matrix distance matching.
"""

__version__ = "0.1.0"

from .classifier import ClassificationResult, EvalReport, classify, evaluate, sweep_core_patterns
from .corepatterns import (
    ClassPatternSet,
    CorePattern,
    MemoryBank,
    binarize,
    build_bank,
    compute_core_patterns,
    kmeans,
)
from .datasetio import (
    FeatureTable,
    SplitSpec,
    load_bank,
    load_features,
    save_bank,
    save_features,
    split,
)
from .errors import DataInvariantError, FileFormatError, MemBankError, UsageError
from .hopfield import (
    BIPOLAR,
    REAL,
    Pattern,
    RecallResult,
    WeightMatrix,
    async_update_sweep,
    bank_distances,
    hebbian_store,
    local_field,
    neuron_energy,
    pattern_distance,
    recall,
    retrieve_nearest,
    single_pattern_weights,
    total_energy,
)

__all__ = [
    "BIPOLAR",
    "REAL",
    "ClassificationResult",
    "ClassPatternSet",
    "CorePattern",
    "DataInvariantError",
    "EvalReport",
    "FeatureTable",
    "FileFormatError",
    "MemBankError",
    "MemoryBank",
    "Pattern",
    "RecallResult",
    "SplitSpec",
    "UsageError",
    "WeightMatrix",
    "async_update_sweep",
    "bank_distances",
    "binarize",
    "build_bank",
    "classify",
    "compute_core_patterns",
    "evaluate",
    "hebbian_store",
    "kmeans",
    "load_bank",
    "load_features",
    "local_field",
    "neuron_energy",
    "pattern_distance",
    "recall",
    "retrieve_nearest",
    "save_bank",
    "save_features",
    "single_pattern_weights",
    "split",
    "sweep_core_patterns",
    "total_energy",
]
