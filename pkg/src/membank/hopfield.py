"""Hopfield associative memory primitives.

Hebbian weight storage, asynchronous sign-update dynamics with energy
bookkeeping, and the weight-matrix distance used to match a probe against
the patterns held in a memory bank.

All operations are pure functions over immutable inputs; weight matrices
and banks can be shared read-only across concurrent workers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Sequence

import numpy as np

from .errors import DataInvariantError

if TYPE_CHECKING:
    from .corepatterns import MemoryBank

REAL = "real"
BIPOLAR = "bipolar"
MODES = (REAL, BIPOLAR)

# Distances within this relative margin of the minimum count as ties.
TIE_EPS = 1e-12


@dataclass(frozen=True, eq=False)
class Pattern:
    """An N-dimensional state vector, real-valued or bipolar ({-1, +1}).

    Values are copied and frozen at construction; N must be >= 2 and all
    components finite.
    """

    values: np.ndarray
    mode: str = REAL

    def __post_init__(self):
        v = np.array(self.values, dtype=np.float64)
        if v.ndim != 1 or v.size < 2:
            raise DataInvariantError(
                f"pattern must be a 1-d vector with at least 2 components, got shape {v.shape}"
            )
        if not np.all(np.isfinite(v)):
            raise DataInvariantError("pattern contains non-finite components")
        if self.mode not in MODES:
            raise DataInvariantError(f"unknown pattern mode {self.mode!r}")
        if self.mode == BIPOLAR and not np.all(np.abs(v) == 1.0):
            raise DataInvariantError("bipolar pattern has components outside {-1, +1}")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def n(self) -> int:
        return self.values.size

    def __len__(self) -> int:
        return self.values.size

    def __neg__(self) -> "Pattern":
        return Pattern(-self.values, self.mode)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Pattern):
            return NotImplemented
        return self.mode == other.mode and np.array_equal(self.values, other.values)


@dataclass(frozen=True, eq=False)
class WeightMatrix:
    """Symmetric, zero-diagonal synaptic weights of an N-neuron network."""

    w: np.ndarray

    def __post_init__(self):
        w = np.array(self.w, dtype=np.float64)
        if w.ndim != 2 or w.shape[0] != w.shape[1]:
            raise DataInvariantError(f"weights must be a square matrix, got shape {w.shape}")
        if not np.all(np.isfinite(w)):
            raise DataInvariantError("weight matrix contains non-finite entries")
        if not np.array_equal(w, w.T):
            raise DataInvariantError("weight matrix must be symmetric")
        if np.any(np.diag(w) != 0.0):
            raise DataInvariantError("weight matrix diagonal must be zero")
        w.setflags(write=False)
        object.__setattr__(self, "w", w)

    @property
    def n(self) -> int:
        return self.w.shape[0]


@dataclass(frozen=True)
class RecallResult:
    """Outcome of running the update dynamics until a stable state.

    energy_trace holds the network energy after each sweep and is
    non-increasing; converged=True means the final state is a fixed point.
    """

    final_state: Pattern
    sweeps_used: int
    converged: bool
    energy_trace: list[float] = field(default_factory=list)


def _check_dims(w: WeightMatrix, state: Pattern):
    if state.n != w.n:
        raise DataInvariantError(
            f"state has {state.n} components but the network has {w.n} neurons"
        )


def hebbian_store(patterns: Sequence[Pattern]) -> WeightMatrix:
    """Build one weight matrix memorizing all given bipolar patterns.

    w[i][j] = (1/N) * sum_u p_u[i] * p_u[j] off the diagonal, 0 on it.
    """
    if len(patterns) == 0:
        raise DataInvariantError("hebbian_store needs at least one pattern")
    n = patterns[0].n
    for u, p in enumerate(patterns):
        if p.mode != BIPOLAR:
            raise DataInvariantError(f"pattern {u} is not bipolar")
        if p.n != n:
            raise DataInvariantError(f"pattern {u} has {p.n} components, expected {n}")
    x = np.stack([p.values for p in patterns])
    w = (x.T @ x) / n
    np.fill_diagonal(w, 0.0)
    return WeightMatrix(w)


def single_pattern_weights(p: Pattern) -> WeightMatrix:
    """Weight matrix characterizing one pattern: w[i][j] = p_i*p_j/N, zero diagonal.

    Accepts real-valued patterns; this is the matrix the distance metric
    compares.
    """
    w = np.outer(p.values, p.values) / p.n
    np.fill_diagonal(w, 0.0)
    return WeightMatrix(w)


def local_field(w: WeightMatrix, state: Pattern, i: int) -> float:
    """Weighted input sum of neuron i under the given state."""
    _check_dims(w, state)
    if not 0 <= i < w.n:
        raise DataInvariantError(f"neuron index {i} out of range for n={w.n}")
    return float(w.w[i] @ state.values)


def async_update_sweep(
    w: WeightMatrix, state: Pattern, order: Sequence[int]
) -> tuple[Pattern, bool]:
    """One pass of asynchronous sign updates, visiting neurons in `order`.

    Each neuron sees the states left by the neurons updated before it.
    A zero local field keeps the neuron's current state, so the sweep
    never increases the network energy. Returns the new state and whether
    any neuron flipped.
    """
    if state.mode != BIPOLAR:
        raise DataInvariantError("asynchronous updates require a bipolar state")
    _check_dims(w, state)
    order = np.asarray(order)
    if order.shape != (w.n,) or not np.array_equal(np.sort(order), np.arange(w.n)):
        raise DataInvariantError("order must be a permutation of 0..N-1")
    x = state.values.copy()
    wm = w.w
    changed = False
    for i in order:
        xi = wm[i] @ x
        if xi > 0.0:
            new = 1.0
        elif xi < 0.0:
            new = -1.0
        else:
            new = x[i]
        if new != x[i]:
            x[i] = new
            changed = True
    return Pattern(x, BIPOLAR), changed


def recall(w: WeightMatrix, probe: Pattern, max_sweeps: int = 100, seed: int = 0) -> RecallResult:
    """Run sweeps from `probe` until a flip-free sweep or `max_sweeps`.

    Each sweep visits the neurons in a fresh seeded-random permutation, so
    runs are reproducible. Non-convergence is reported in the result, not
    raised.
    """
    if probe.mode != BIPOLAR:
        raise DataInvariantError("recall requires a bipolar probe")
    if max_sweeps < 1:
        raise DataInvariantError("max_sweeps must be >= 1")
    _check_dims(w, probe)
    rng = np.random.default_rng(seed)
    state = probe
    trace: list[float] = []
    for sweep in range(1, max_sweeps + 1):
        order = rng.permutation(w.n)
        state, changed = async_update_sweep(w, state, order)
        trace.append(total_energy(w, state))
        if not changed:
            return RecallResult(state, sweep, True, trace)
    return RecallResult(state, max_sweeps, False, trace)


def neuron_energy(w: WeightMatrix, state: Pattern, i: int) -> float:
    """Energy contribution of neuron i: -(1/2) * field_i * x_i."""
    return -0.5 * local_field(w, state, i) * float(state.values[i])


def total_energy(w: WeightMatrix, state: Pattern) -> float:
    """Network energy -(1/2) * sum_ij w[i][j] x_i x_j."""
    _check_dims(w, state)
    x = state.values
    return float(-0.5 * (x @ (w.w @ x)))


def _check_pair(t: Pattern, s: Pattern):
    if t.n != s.n:
        raise DataInvariantError(f"patterns have mismatched dimensions {t.n} and {s.n}")
    if t.mode != s.mode:
        raise DataInvariantError(f"patterns have mismatched modes {t.mode!r} and {s.mode!r}")


def _sqrt_radicand(rad: float, scale: float) -> float:
    # Cancellation in the closed form can leave a tiny negative radicand.
    if rad < 0.0:
        if rad >= -TIE_EPS * max(1.0, scale):
            return 0.0
        raise ArithmeticError(f"distance radicand {rad} is negative beyond rounding noise")
    return math.sqrt(rad)


def pattern_distance(t: Pattern, s: Pattern, method: str = "fast") -> float:
    """Frobenius distance between the two patterns' weight matrices.

    `naive` materializes both N x N matrices; `fast` evaluates the
    algebraically equivalent closed form

        Diff^2 = (|t|^4 + |s|^4 - 2(t.s)^2 - sum_i (t_i^2 - s_i^2)^2) / N^2

    in O(N). The metric is even in each argument: negating t or s leaves
    it unchanged.
    """
    _check_pair(t, s)
    if method == "naive":
        d = single_pattern_weights(t).w - single_pattern_weights(s).w
        return math.sqrt(float(np.sum(d * d)))
    if method != "fast":
        raise ValueError(f"unknown method {method!r}, expected 'fast' or 'naive'")
    tv, sv = t.values, s.values
    n = tv.size
    nt2 = float(tv @ tv)
    ns2 = float(sv @ sv)
    ts = float(tv @ sv)
    dsq = tv * tv - sv * sv
    cross = float(dsq @ dsq)
    scale = nt2 * nt2 + ns2 * ns2
    rad = (scale - 2.0 * ts * ts - cross) / (n * n)
    return _sqrt_radicand(rad, scale / (n * n))


def bank_distances(test: Pattern, bank: "MemoryBank") -> np.ndarray:
    """Closed-form distance from `test` to every core pattern in the bank.

    Uses the bank's precomputed per-pattern statistics, so one call costs
    O(z*N) instead of materializing z weight matrices.
    """
    if len(bank.core_patterns) == 0:
        raise DataInvariantError("memory bank is empty")
    if test.n != bank.n:
        raise DataInvariantError(
            f"test pattern has {test.n} components but the bank holds {bank.n}"
        )
    if test.mode != bank.mode:
        raise DataInvariantError(
            f"test pattern mode {test.mode!r} does not match bank mode {bank.mode!r}"
        )
    matrix, sq, norm4, quart = bank.distance_stats()
    tv = test.values
    t2 = tv * tv
    nt2 = float(tv @ tv)
    t4 = float(t2 @ t2)
    dots = matrix @ tv
    cross = sq @ t2
    scale = nt2 * nt2 + norm4
    rad = (scale - 2.0 * dots * dots - (t4 + quart - 2.0 * cross)) / (bank.n * bank.n)
    tiny = rad < 0.0
    if np.any(tiny):
        bound = -TIE_EPS * np.maximum(1.0, scale / (bank.n * bank.n))
        if np.any(rad[tiny] < bound[tiny]):
            raise ArithmeticError("distance radicand is negative beyond rounding noise")
        rad = np.where(tiny, 0.0, rad)
    return np.sqrt(rad)


def tied_minimum_ids(distances: np.ndarray, bank: "MemoryBank") -> list[str]:
    """Ids of all core patterns within the tie margin of the minimum distance."""
    dmin = float(distances.min())
    tie = distances <= dmin * (1.0 + TIE_EPS)
    return sorted(bank.core_patterns[u].id for u in np.flatnonzero(tie))


def retrieve_nearest(test: Pattern, bank: "MemoryBank") -> list[str]:
    """All core-pattern ids at the minimum distance from `test`, sorted by id.

    Exact and near-exact ties (relative margin 1e-12) are all returned.
    """
    return tied_minimum_ids(bank_distances(test, bank), bank)
