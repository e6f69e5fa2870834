"""Command-line pipeline: build banks, classify, evaluate, sweep, recall.

stdout carries machine-greppable key=value lines; human-oriented detail goes
to stderr. Exit codes: 0 success, 1 usage error, 2 I/O or file-format error,
3 data-invariant violation. All commands are deterministic given their flags
and seeds: reruns produce byte-identical outputs, independent of --threads.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
from dataclasses import dataclass

import numpy as np

from . import __version__
from .classifier import EvalReport, classify, evaluate, sweep_core_patterns
from .corepatterns import build_bank
from .datasetio import FeatureTable, SplitSpec, load_bank, load_features, save_bank, split
from .errors import DataInvariantError, FileFormatError, UsageError
from .hopfield import BIPOLAR, MODES, REAL, Pattern, hebbian_store, recall

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_IO = 2
EXIT_DATA = 3

REPORT_FORMAT = "membank-report"
REPORT_VERSION = 1


class _Parser(argparse.ArgumentParser):
    # usage problems must exit 1, not argparse's default 2
    def error(self, message):
        raise UsageError(message)


@dataclass
class RunConfig:
    """Validated parameters for one command run.

    Defaults: k=1, mode=real, seed=0, threads=1, max_sweeps=100, noise=0.1,
    test_per_class='all'; split flags and output paths default to off.
    """

    command: str
    features: str | None = None
    test_features: str | None = None
    bank: str | None = None
    out: str | None = None
    k: int = 1
    mode: str = REAL
    seed: int = 0
    train_per_class: int | None = None
    test_per_class: str = "all"
    allow_small_classes: bool = False
    k_list: str | None = None
    threads: int = 1
    row_id: str | None = None
    pattern_id: str | None = None
    noise: float = 0.1
    max_sweeps: int = 100

    def validate(self) -> None:
        if self.k < 1:
            raise UsageError(f"--k must be >= 1, got {self.k}")
        if self.mode not in MODES:
            raise UsageError(f"--mode must be one of {MODES}, got {self.mode!r}")
        if self.seed < 0:
            raise UsageError(f"--seed must be >= 0, got {self.seed}")
        if self.threads < 1:
            raise UsageError(f"--threads must be >= 1, got {self.threads}")
        if self.max_sweeps < 1:
            raise UsageError(f"--max-sweeps must be >= 1, got {self.max_sweeps}")
        if not 0.0 <= self.noise <= 1.0:
            raise UsageError(f"--noise must be in [0, 1], got {self.noise}")
        if self.train_per_class is not None and self.train_per_class < 1:
            raise UsageError(f"--train-per-class must be >= 1, got {self.train_per_class}")
        if self.test_per_class != "all":
            try:
                tpc = int(self.test_per_class)
            except ValueError:
                raise UsageError(
                    f"--test-per-class must be an integer or 'all', got {self.test_per_class!r}"
                ) from None
            if tpc < 1:
                raise UsageError(f"--test-per-class must be >= 1, got {tpc}")
        if self.test_per_class != "all" and self.train_per_class is None:
            raise UsageError("--test-per-class requires --train-per-class")
        if self.command == "sweep":
            if not self.k_list:
                raise UsageError("sweep requires --k-list")
            try:
                ks = [int(tok) for tok in self.k_list.split(",")]
            except ValueError:
                raise UsageError(f"--k-list must be comma-separated integers, got {self.k_list!r}") from None
            if not ks or any(k < 1 for k in ks):
                raise UsageError("--k-list values must all be >= 1")
            if self.train_per_class is None and self.test_features is None:
                raise UsageError("sweep needs either --train-per-class or --test-features")
            if self.train_per_class is not None and self.test_features is not None:
                raise UsageError("sweep takes --train-per-class or --test-features, not both")

    def split_spec(self) -> SplitSpec | None:
        if self.train_per_class is None:
            return None
        tpc = None if self.test_per_class == "all" else int(self.test_per_class)
        return SplitSpec(self.train_per_class, tpc, self.seed)

    def parsed_k_list(self) -> list[int]:
        return [int(tok) for tok in self.k_list.split(",")]


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _emit(key: str, value) -> None:
    sys.stdout.write(f"{key}={_fmt(value)}\n")


def _note(message: str) -> None:
    sys.stderr.write(message + "\n")


def render_report(report: EvalReport) -> str:
    """Report document: key=value header lines, then the confusion matrix
    as a CSV block introduced by a `confusion:` line (rows = true labels)."""
    buf = io.StringIO()
    buf.write(f"format={REPORT_FORMAT}\n")
    buf.write(f"version={REPORT_VERSION}\n")
    buf.write(f"accuracy={_fmt(report.mean_per_class_accuracy)}\n")
    buf.write(f"n_test={report.n_test}\n")
    buf.write(f"false_positives={report.false_positives_total}\n")
    buf.write(f"classes_scored={len(report.per_class_accuracy)}\n")
    buf.write(f"classes_excluded={','.join(report.excluded_classes)}\n")
    for label in sorted(report.per_class_accuracy):
        buf.write(f"class_accuracy.{label}={_fmt(report.per_class_accuracy[label])}\n")
    buf.write("confusion:\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["label"] + report.labels)
    for i, label in enumerate(report.labels):
        writer.writerow([label] + [int(c) for c in report.confusion[i]])
    return buf.getvalue()


def _train_table(cfg: RunConfig) -> FeatureTable:
    table = load_features(cfg.features)
    spec = cfg.split_spec()
    if spec is None:
        return table
    train, _ = split(table, spec, allow_small_classes=cfg.allow_small_classes)
    return train


def _test_table(cfg: RunConfig) -> FeatureTable:
    table = load_features(cfg.features)
    spec = cfg.split_spec()
    if spec is None:
        return table
    _, test = split(table, spec, allow_small_classes=cfg.allow_small_classes)
    return test


def cmd_train(cfg: RunConfig) -> int:
    train = _train_table(cfg)
    bank = build_bank(train, cfg.k, mode=cfg.mode, seed=cfg.seed)
    save_bank(bank, cfg.out)
    _note(f"trained bank on {len(train)} rows -> {cfg.out}")
    _emit("bank_size", len(bank))
    _emit("n", bank.n)
    _emit("mode", bank.mode)
    counts: dict[str, int] = {}
    for cp in bank.core_patterns:
        counts[cp.class_id] = counts.get(cp.class_id, 0) + 1
    for label in sorted(counts):
        _emit(f"core_patterns.{label}", counts[label])
    return EXIT_OK


def cmd_evaluate(cfg: RunConfig) -> int:
    test = _test_table(cfg)
    bank = load_bank(cfg.bank)
    report = evaluate(test, bank, rng_seed=cfg.seed, threads=cfg.threads)
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(render_report(report))
        _note(f"report written to {cfg.out}")
    _emit("accuracy", report.mean_per_class_accuracy)
    return EXIT_OK


def cmd_classify_one(cfg: RunConfig) -> int:
    table = load_features(cfg.features)
    bank = load_bank(cfg.bank)
    if len(table) == 0:
        raise DataInvariantError("feature table has no rows")
    if cfg.row_id is None:
        row = 0
    else:
        try:
            row = table.ids.index(cfg.row_id)
        except ValueError:
            raise DataInvariantError(f"row id {cfg.row_id!r} not found") from None
    result = classify(Pattern(table.values[row], REAL), bank, rng_seed=cfg.seed)
    _emit("row_id", table.ids[row])
    _emit("label", result.predicted_label)
    _emit("distance", result.min_distance)
    _emit("tie", result.tie_broken_randomly)
    _emit("candidates", ",".join(result.tied_candidates))
    return EXIT_OK


def cmd_sweep(cfg: RunConfig) -> int:
    if cfg.test_features is not None:
        train = load_features(cfg.features)
        test = load_features(cfg.test_features)
    else:
        table = load_features(cfg.features)
        train, test = split(table, cfg.split_spec(), allow_small_classes=cfg.allow_small_classes)
    curve = sweep_core_patterns(
        train, test, cfg.parsed_k_list(), mode=cfg.mode, seed=cfg.seed, threads=cfg.threads
    )
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("k,accuracy\n")
            for k, acc in curve:
                fh.write(f"{k},{_fmt(acc)}\n")
        _note(f"sweep curve written to {cfg.out}")
    for k, acc in curve:
        _emit(f"accuracy.k{k}", acc)
    return EXIT_OK


def cmd_recall(cfg: RunConfig) -> int:
    bank = load_bank(cfg.bank)
    if bank.mode != BIPOLAR:
        raise DataInvariantError("recall dynamics need a bipolar bank (built with --mode bipolar)")
    if cfg.pattern_id is None:
        target = bank.core_patterns[0]
    else:
        matches = [cp for cp in bank.core_patterns if cp.id == cfg.pattern_id]
        if not matches:
            raise DataInvariantError(f"pattern id {cfg.pattern_id!r} not found in bank")
        target = matches[0]
    weights = hebbian_store([cp.values for cp in bank.core_patterns])
    flips = round(cfg.noise * bank.n)
    probe_values = target.values.values.copy()
    if flips > 0:
        noise_rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, 1]))
        idx = noise_rng.choice(bank.n, size=flips, replace=False)
        probe_values[idx] *= -1.0
    result = recall(weights, Pattern(probe_values, BIPOLAR), max_sweeps=cfg.max_sweeps, seed=cfg.seed)
    _note(
        f"recall of {target.id!r} from {flips} flipped components "
        f"({len(bank)} stored patterns, n={bank.n})"
    )
    _emit("pattern_id", target.id)
    _emit("stored_patterns", len(bank))
    _emit("noise_flips", flips)
    _emit("sweeps_used", result.sweeps_used)
    _emit("converged", result.converged)
    _emit("recovered", result.final_state == target.values)
    _emit("energy_trace", ",".join(_fmt(e) for e in result.energy_trace))
    return EXIT_OK


def build_parser() -> _Parser:
    parser = _Parser(
        prog="membank",
        description="Core-pattern memory bank: train, classify, evaluate, sweep, recall.",
        epilog="Exit codes: 0 success, 1 usage error, 2 I/O error, 3 data-invariant error.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_split_flags(p):
        p.add_argument("--train-per-class", type=int, default=None,
                       help="split: training rows per class (default: no split)")
        p.add_argument("--test-per-class", default="all",
                       help="split: test rows per class, or 'all' for every remaining row (default: all)")
        p.add_argument("--allow-small-classes", action="store_true",
                       help="put all rows of too-small classes into train instead of failing")

    p = sub.add_parser("train", help="build a memory bank from labeled features")
    p.add_argument("--features", required=True, help="feature table (CSV or FTB1)")
    p.add_argument("--out", required=True, help="bank output path")
    p.add_argument("--k", type=int, default=1, help="core patterns per class (default: 1)")
    p.add_argument("--mode", default=REAL, help="pattern mode: real or bipolar (default: real)")
    p.add_argument("--seed", type=int, default=0, help="seed for clustering and splits (default: 0)")
    add_split_flags(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("evaluate", help="score a bank on test features")
    p.add_argument("--features", required=True, help="feature table; the test half if split flags are given")
    p.add_argument("--bank", required=True, help="bank file from `train`")
    p.add_argument("--seed", type=int, default=0, help="seed for tie-breaking and splits (default: 0)")
    p.add_argument("--threads", type=int, default=1, help="worker threads (default: 1; results identical)")
    p.add_argument("--out", default=None, help="write the full report document here")
    add_split_flags(p)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("classify-one", help="classify a single feature row")
    p.add_argument("--features", required=True, help="feature table (CSV or FTB1)")
    p.add_argument("--bank", required=True, help="bank file from `train`")
    p.add_argument("--row-id", default=None, help="row to classify (default: first row)")
    p.add_argument("--seed", type=int, default=0, help="tie-breaking seed (default: 0)")
    p.set_defaults(func=cmd_classify_one)

    p = sub.add_parser("sweep", help="accuracy curve over core-pattern counts")
    p.add_argument("--features", required=True, help="feature table; training half under split flags")
    p.add_argument("--test-features", default=None,
                   help="separate pre-split test table (alternative to split flags)")
    p.add_argument("--k-list", required=True, help="comma-separated core-pattern counts, e.g. 1,2,4,8")
    p.add_argument("--mode", default=REAL, help="pattern mode: real or bipolar (default: real)")
    p.add_argument("--seed", type=int, default=0, help="seed for clustering/splits/ties (default: 0)")
    p.add_argument("--threads", type=int, default=1, help="worker threads (default: 1; results identical)")
    p.add_argument("--out", default=None, help="write `k,accuracy` CSV here")
    add_split_flags(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("recall", help="energy-descent retrieval demo from a noisy stored pattern")
    p.add_argument("--bank", required=True, help="bipolar bank file")
    p.add_argument("--pattern-id", default=None, help="stored pattern to corrupt (default: first)")
    p.add_argument("--noise", type=float, default=0.1,
                   help="fraction of components to flip (default: 0.1)")
    p.add_argument("--max-sweeps", type=int, default=100, help="sweep budget (default: 100)")
    p.add_argument("--seed", type=int, default=0, help="seed for noise and update order (default: 0)")
    p.set_defaults(func=cmd_recall)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        fields = {f for f in RunConfig.__dataclass_fields__}
        cfg = RunConfig(**{k.replace("-", "_"): v for k, v in vars(args).items()
                           if k.replace("-", "_") in fields})
        cfg.validate()
        return args.func(cfg)
    except UsageError as e:
        _note(f"usage error: {e}")
        return EXIT_USAGE
    except FileFormatError as e:
        _note(f"file error: {e}")
        return EXIT_IO
    except OSError as e:
        _note(f"i/o error: {e}")
        return EXIT_IO
    except DataInvariantError as e:
        _note(f"data error: {e}")
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
