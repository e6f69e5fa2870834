"""Core-pattern computation and memory-bank assembly.

Each class's feature vectors are condensed into a handful of core patterns
(cluster centers) which the bank stores as class representatives. Clustering
is plain Lloyd iteration with k-means++ seeding; centers can optionally be
binarized against per-dimension training medians for bipolar dynamics.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from .errors import DataInvariantError
from .hopfield import BIPOLAR, MODES, REAL, Pattern

if TYPE_CHECKING:
    from .datasetio import FeatureTable

DEFAULT_TOL = 1e-6
DEFAULT_MAX_ITER = 300


@dataclass(frozen=True)
class ClassPatternSet:
    """All memory patterns (feature vectors) observed for one class."""

    class_id: str
    patterns: list[Pattern]

    def __post_init__(self):
        if len(self.patterns) == 0:
            raise DataInvariantError(f"class {self.class_id!r} has no patterns")
        n = self.patterns[0].n
        for i, p in enumerate(self.patterns):
            if p.mode != REAL:
                raise DataInvariantError(f"class {self.class_id!r} pattern {i} is not real-valued")
            if p.n != n:
                raise DataInvariantError(
                    f"class {self.class_id!r} pattern {i} has {p.n} components, expected {n}"
                )

    def matrix(self) -> np.ndarray:
        return np.stack([p.values for p in self.patterns])


@dataclass(frozen=True)
class CorePattern:
    """One stored class representative: a cluster center and its bookkeeping."""

    id: str
    class_id: str
    values: Pattern
    member_count: int

    def __post_init__(self):
        if self.member_count < 1:
            raise DataInvariantError(f"core pattern {self.id!r} has an empty cluster")


@dataclass(eq=False)
class MemoryBank:
    """Labeled collection of core patterns, plus binarization metadata.

    Immutable after construction; may be shared read-only across workers.
    thresholds are present exactly when mode is bipolar.
    """

    n: int
    mode: str
    core_patterns: list[CorePattern]
    thresholds: np.ndarray | None
    k_per_class: int

    def __post_init__(self):
        if self.mode not in MODES:
            raise DataInvariantError(f"unknown bank mode {self.mode!r}")
        if self.n < 2:
            raise DataInvariantError("bank dimension must be >= 2")
        if self.k_per_class < 1:
            raise DataInvariantError("k_per_class must be >= 1")
        if len(self.core_patterns) == 0:
            raise DataInvariantError("memory bank has no core patterns")
        seen: set[str] = set()
        counts: dict[str, int] = {}
        for cp in self.core_patterns:
            if cp.id in seen:
                raise DataInvariantError(f"duplicate core pattern id {cp.id!r}")
            seen.add(cp.id)
            if cp.values.n != self.n:
                raise DataInvariantError(
                    f"core pattern {cp.id!r} has {cp.values.n} components, bank holds {self.n}"
                )
            if cp.values.mode != self.mode:
                raise DataInvariantError(
                    f"core pattern {cp.id!r} mode {cp.values.mode!r} does not match bank mode"
                )
            counts[cp.class_id] = counts.get(cp.class_id, 0) + 1
        for label, count in counts.items():
            if count > self.k_per_class:
                raise DataInvariantError(
                    f"class {label!r} has {count} core patterns, above k_per_class={self.k_per_class}"
                )
        if self.mode == BIPOLAR:
            if self.thresholds is None:
                raise DataInvariantError("bipolar bank requires binarization thresholds")
            t = np.array(self.thresholds, dtype=np.float64)
            if t.shape != (self.n,):
                raise DataInvariantError(
                    f"thresholds have shape {t.shape}, expected ({self.n},)"
                )
            if not np.all(np.isfinite(t)):
                raise DataInvariantError("thresholds contain non-finite values")
            t.setflags(write=False)
            self.thresholds = t
        elif self.thresholds is not None:
            raise DataInvariantError("real-mode bank must not carry thresholds")
        self._label_by_id = {cp.id: cp.class_id for cp in self.core_patterns}
        self._stats = None

    def __len__(self) -> int:
        return len(self.core_patterns)

    def class_labels(self) -> list[str]:
        return sorted({cp.class_id for cp in self.core_patterns})

    def label_of(self, core_id: str) -> str:
        return self._label_by_id[core_id]

    def distance_stats(self):
        """Per-pattern arrays used by the closed-form distance: values,
        squared values, squared-norm squared, and fourth-power sums."""
        if self._stats is None:
            matrix = np.stack([cp.values.values for cp in self.core_patterns])
            sq = matrix * matrix
            norm2 = sq.sum(axis=1)
            self._stats = (matrix, sq, norm2 * norm2, (sq * sq).sum(axis=1))
        return self._stats


def _as_matrix(points) -> np.ndarray:
    if isinstance(points, np.ndarray):
        x = np.asarray(points, dtype=np.float64)
    else:
        x = np.stack([p.values if isinstance(p, Pattern) else np.asarray(p, dtype=np.float64)
                      for p in points]) if len(points) else np.empty((0, 0))
    if x.ndim != 2:
        raise DataInvariantError(f"points must form a 2-d array, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise DataInvariantError("points contain non-finite values")
    return x


def _sq_dist_to(x: np.ndarray, center: np.ndarray) -> np.ndarray:
    d = x - center
    return np.einsum("ij,ij->i", d, d)


def _plusplus_init(x: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    """k-means++ seeding: each next center sampled with probability
    proportional to the squared distance from the nearest chosen one."""
    n = x.shape[0]
    centers = np.empty((k, x.shape[1]), dtype=np.float64)
    centers[0] = x[int(rng.integers(n))]
    d2 = _sq_dist_to(x, centers[0])
    for j in range(1, k):
        total = float(d2.sum())
        if total <= 0.0:
            raise DataInvariantError(f"k={k} exceeds the number of distinct points")
        idx = int(rng.choice(n, p=d2 / total))
        centers[j] = x[idx]
        np.minimum(d2, _sq_dist_to(x, centers[j]), out=d2)
    return centers


def _assign(x: np.ndarray, centers: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Nearest-center assignment plus each point's squared distance to it.

    Distances use the same direct (x - c)^2 formula as the objective so the
    trace stays monotone in floating point. Work is chunked to bound memory.
    """
    n = x.shape[0]
    assign = np.empty(n, dtype=np.int64)
    best = np.empty(n, dtype=np.float64)
    step = max(1, int(2**22 // max(1, centers.shape[0] * x.shape[1])))
    for lo in range(0, n, step):
        hi = min(n, lo + step)
        d = x[lo:hi, None, :] - centers[None, :, :]
        d2 = np.einsum("ikj,ikj->ik", d, d)
        assign[lo:hi] = np.argmin(d2, axis=1)
        best[lo:hi] = d2[np.arange(hi - lo), assign[lo:hi]]
    return assign, best


def _repair_empty(x, centers, assign, best, k):
    """Give every empty cluster the point currently farthest from its center."""
    counts = np.bincount(assign, minlength=k)
    while np.any(counts == 0):
        j = int(np.flatnonzero(counts == 0)[0])
        # only steal from clusters that keep at least one member
        eligible = counts[assign] >= 2
        if not np.any(eligible):
            raise DataInvariantError("cannot repair empty cluster: too few distinct points")
        cand = np.flatnonzero(eligible)
        donor = int(cand[np.argmax(best[cand])])
        counts[assign[donor]] -= 1
        assign[donor] = j
        counts[j] = 1
        centers[j] = x[donor]
        best[donor] = 0.0
    return assign, best


def kmeans(
    points,
    k: int,
    seed: int = 0,
    max_iter: int = DEFAULT_MAX_ITER,
    tol: float = DEFAULT_TOL,
) -> tuple[np.ndarray, np.ndarray, list[float]]:
    """Lloyd's clustering with k-means++ seeding.

    points may be an (n, d) array or a sequence of real Patterns. Returns
    (centers, assignments, objective_trace); the objective (total squared
    distance to the assigned center) is non-increasing across iterations,
    every cluster is non-empty, and each final center is exactly the mean
    of its assigned points. Deterministic given (points order, k, seed).
    Stops when the relative objective improvement drops below tol.
    """
    x = _as_matrix(points)
    n = x.shape[0]
    if n == 0:
        raise DataInvariantError("kmeans needs at least one point")
    if k < 1:
        raise DataInvariantError(f"k must be >= 1, got {k}")
    if k > n:
        raise DataInvariantError(f"k={k} exceeds the number of points ({n})")
    rng = np.random.default_rng(seed)
    centers = _plusplus_init(x, k, rng)
    trace: list[float] = []
    prev = np.inf
    assign = np.zeros(n, dtype=np.int64)
    for _ in range(max_iter):
        assign, best = _assign(x, centers)
        assign, best = _repair_empty(x, centers, assign, best, k)
        for j in range(k):
            centers[j] = x[assign == j].mean(axis=0)
        resid = x - centers[assign]
        obj = float(np.einsum("ij,ij->", resid, resid))
        trace.append(obj)
        if prev - obj <= tol * prev:
            break
        prev = obj
    return centers, assign, trace


def compute_core_patterns(cls: ClassPatternSet, k: int, seed: int = 0) -> list[CorePattern]:
    """Cluster one class's patterns into at most k core patterns.

    k is capped at the number of distinct patterns so duplicate centers are
    never emitted; every returned cluster has at least one member.
    """
    if k < 1:
        raise DataInvariantError(f"k must be >= 1, got {k}")
    x = cls.matrix()
    n_distinct = np.unique(x, axis=0).shape[0]
    kk = min(k, n_distinct)
    centers, assign, _ = kmeans(x, kk, seed=seed)
    counts = np.bincount(assign, minlength=kk)
    return [
        CorePattern(
            id=f"{cls.class_id}#{j}",
            class_id=cls.class_id,
            values=Pattern(centers[j], REAL),
            member_count=int(counts[j]),
        )
        for j in range(kk)
    ]


def binarize(p: Pattern | np.ndarray, thresholds: np.ndarray) -> Pattern:
    """Map a real vector to bipolar: +1 where above threshold, else -1.

    Components exactly at the threshold map to -1 (fixed tie rule).
    """
    v = p.values if isinstance(p, Pattern) else np.asarray(p, dtype=np.float64)
    t = np.asarray(thresholds, dtype=np.float64)
    if t.shape != v.shape:
        raise DataInvariantError(
            f"thresholds have shape {t.shape}, pattern has shape {v.shape}"
        )
    return Pattern(np.where(v > t, 1.0, -1.0), BIPOLAR)


def _class_seed(seed: int, class_index: int) -> int:
    return int(np.random.SeedSequence([seed, class_index]).generate_state(1, np.uint64)[0])


def build_bank(
    train: "FeatureTable", k_per_class: int, mode: str = REAL, seed: int = 0
) -> MemoryBank:
    """Assemble a memory bank from labeled training features.

    Groups rows by label and clusters each class independently. In bipolar
    mode the per-dimension medians of ALL training rows become the
    binarization thresholds (test data never influences them) and every
    core pattern is binarized against them.
    """
    if mode not in MODES:
        raise DataInvariantError(f"unknown bank mode {mode!r}")
    if k_per_class < 1:
        raise DataInvariantError(f"k_per_class must be >= 1, got {k_per_class}")
    if len(train) == 0:
        raise DataInvariantError("empty training set")
    labels = sorted(set(train.labels))
    label_arr = np.asarray(train.labels)
    thresholds = np.median(train.values, axis=0) if mode == BIPOLAR else None
    cores: list[CorePattern] = []
    for ci, label in enumerate(labels):
        rows = train.values[label_arr == label]
        cls = ClassPatternSet(label, [Pattern(r, REAL) for r in rows])
        cps = compute_core_patterns(cls, k_per_class, seed=_class_seed(seed, ci))
        if mode == BIPOLAR:
            cps = [
                CorePattern(cp.id, cp.class_id, binarize(cp.values, thresholds), cp.member_count)
                for cp in cps
            ]
        cores.extend(cps)
    return MemoryBank(
        n=train.dim, mode=mode, core_patterns=cores, thresholds=thresholds, k_per_class=k_per_class
    )
