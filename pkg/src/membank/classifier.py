"""Classification against a memory bank, evaluation metrics, k sweeps.

A test feature vector is converted to the bank's pattern mode, matched
against every stored core pattern by weight-matrix distance, and labeled by
the nearest one; exact ties are broken by a seeded random choice so full
evaluations stay reproducible (each test row gets its own substream, which
also makes results independent of worker scheduling).
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .corepatterns import MemoryBank, binarize, build_bank
from .datasetio import FeatureTable
from .errors import DataInvariantError
from .hopfield import BIPOLAR, REAL, Pattern, bank_distances, tied_minimum_ids


@dataclass(frozen=True)
class ClassificationResult:
    predicted_label: str
    tied_candidates: list[str]
    min_distance: float
    tie_broken_randomly: bool


@dataclass(eq=False)
class EvalReport:
    """Per-class accuracies plus the full confusion matrix.

    labels indexes both confusion axes (rows = true, columns = predicted).
    Classes with no test rows are excluded from the mean and listed in
    excluded_classes. false_positives_total counts all off-diagonal entries.
    """

    labels: list[str]
    confusion: np.ndarray
    per_class_accuracy: dict[str, float]
    mean_per_class_accuracy: float
    false_positives_total: int
    n_test: int
    excluded_classes: list[str]


def classify(test_feature: Pattern, bank: MemoryBank, rng_seed: int = 0) -> ClassificationResult:
    """Label one real-valued feature vector by its nearest core pattern.

    In bipolar banks the feature is binarized with the bank's thresholds
    first. When several core patterns tie at the minimum distance, one is
    chosen uniformly at random from the seeded stream.
    """
    if test_feature.mode != REAL:
        raise DataInvariantError("classify expects a real-valued feature pattern")
    if test_feature.n != bank.n:
        raise DataInvariantError(
            f"feature has {test_feature.n} components but the bank holds {bank.n}"
        )
    pattern = binarize(test_feature, bank.thresholds) if bank.mode == BIPOLAR else test_feature
    distances = bank_distances(pattern, bank)
    candidates = tied_minimum_ids(distances, bank)
    if len(candidates) == 1:
        chosen = candidates[0]
        tie = False
    else:
        rng = np.random.default_rng(rng_seed)
        chosen = candidates[int(rng.integers(len(candidates)))]
        tie = True
    return ClassificationResult(
        predicted_label=bank.label_of(chosen),
        tied_candidates=candidates,
        min_distance=float(distances.min()),
        tie_broken_randomly=tie,
    )


def _row_seed(rng_seed: int, row_index: int) -> int:
    return int(np.random.SeedSequence([rng_seed, row_index]).generate_state(1, np.uint64)[0])


def evaluate(
    test: FeatureTable, bank: MemoryBank, rng_seed: int = 0, threads: int = 1
) -> EvalReport:
    """Classify every test row and aggregate the per-class metrics.

    Deterministic given (test, bank, rng_seed): row i uses the substream
    derived from (rng_seed, i), so thread count cannot change the result.
    Test labels the bank has never seen get their own confusion rows and
    score as errors.
    """
    if len(test) == 0:
        raise DataInvariantError("empty test set")
    if test.dim != bank.n:
        raise DataInvariantError(f"test dim {test.dim} does not match bank dimension {bank.n}")
    labels = sorted(set(bank.class_labels()) | set(test.labels))
    index = {label: i for i, label in enumerate(labels)}

    def predict(i: int) -> str:
        feature = Pattern(test.values[i], REAL)
        return classify(feature, bank, rng_seed=_row_seed(rng_seed, i)).predicted_label

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            predictions = list(pool.map(predict, range(len(test))))
    else:
        predictions = [predict(i) for i in range(len(test))]

    confusion = np.zeros((len(labels), len(labels)), dtype=np.int64)
    for true, pred in zip(test.labels, predictions):
        confusion[index[true], index[pred]] += 1
    row_totals = confusion.sum(axis=1)
    per_class = {
        labels[i]: float(confusion[i, i] / row_totals[i])
        for i in range(len(labels))
        if row_totals[i] > 0
    }
    excluded = [labels[i] for i in range(len(labels)) if row_totals[i] == 0]
    return EvalReport(
        labels=labels,
        confusion=confusion,
        per_class_accuracy=per_class,
        mean_per_class_accuracy=float(np.mean(list(per_class.values()))),
        false_positives_total=int(confusion.sum() - np.trace(confusion)),
        n_test=len(test),
        excluded_classes=excluded,
    )


def sweep_core_patterns(
    train: FeatureTable,
    test: FeatureTable,
    k_list: list[int],
    mode: str = REAL,
    seed: int = 0,
    threads: int = 1,
) -> list[tuple[int, float]]:
    """Mean per-class accuracy for each core-pattern count in k_list.

    Builds a fresh bank per k (same seed throughout) and evaluates it;
    the curve comes back in k_list order.
    """
    if len(k_list) == 0:
        raise DataInvariantError("k_list must not be empty")
    for k in k_list:
        if k < 1:
            raise DataInvariantError(f"k values must be >= 1, got {k}")
    curve = []
    for k in k_list:
        bank = build_bank(train, k, mode=mode, seed=seed)
        report = evaluate(test, bank, rng_seed=seed, threads=threads)
        curve.append((k, report.mean_per_class_accuracy))
    return curve
