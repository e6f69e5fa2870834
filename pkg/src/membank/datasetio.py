"""Feature-table file formats, deterministic splits, bank persistence.

Formats (stable, versioned):

* CSV feature table: header ``id,label,f0,...,f{D-1}``, UTF-8, LF line
  endings, floats written with shortest round-trip precision (any decimal
  that parses back to the same float64 is accepted on load).
* FTB1 binary feature table: magic ``FTB1``, little-endian u32 dim,
  u64 row count, then per row a u32-length-prefixed UTF-8 id and label,
  then the value matrix as row-major little-endian float64.
* Bank: a JSON document with a ``version: 1`` field. Scalar arrays move to
  a raw float64 little-endian sidecar file (``<name>.bin``) when the bank
  holds more than 10^6 scalars; the JSON then stores [offset, length]
  references in scalars.

Splits shuffle each class with Fisher-Yates driven by a Philox4x64-10
counter-based generator keyed by (seed, class index in lexicographic label
order); bounded draws use rejection sampling on raw 64-bit words, so the
procedure is reproducible from this description alone.
"""

from __future__ import annotations

import csv
import json
import math
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .corepatterns import CorePattern, MemoryBank
from .errors import DataInvariantError, FileFormatError
from .hopfield import BIPOLAR, Pattern

FTB_MAGIC = b"FTB1"
BANK_FORMAT = "membank-bank"
BANK_VERSION = 1
SIDECAR_LIMIT = 1_000_000  # scalars kept inline in the bank JSON


@dataclass(eq=False)
class FeatureTable:
    """Labeled feature vectors, one row per image/sample."""

    ids: list[str]
    labels: list[str]
    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=np.float64)
        if v.ndim != 2:
            raise DataInvariantError(f"values must be 2-d, got shape {v.shape}")
        if v.shape[1] < 2:
            raise DataInvariantError(f"feature dimension must be >= 2, got {v.shape[1]}")
        if len(self.ids) != v.shape[0] or len(self.labels) != v.shape[0]:
            raise DataInvariantError("ids, labels and value rows must have equal length")
        if not np.all(np.isfinite(v)):
            raise DataInvariantError("feature values contain non-finite entries")
        if len(set(self.ids)) != len(self.ids):
            seen, dup = set(), None
            for i in self.ids:
                if i in seen:
                    dup = i
                    break
                seen.add(i)
            raise DataInvariantError(f"duplicate row id {dup!r}")
        v.setflags(write=False)
        self.values = v

    @property
    def dim(self) -> int:
        return self.values.shape[1]

    def __len__(self) -> int:
        return self.values.shape[0]

    def rows(self):
        for i in range(len(self)):
            yield self.ids[i], self.labels[i], self.values[i]

    def subset(self, indices) -> "FeatureTable":
        idx = list(indices)
        return FeatureTable(
            ids=[self.ids[i] for i in idx],
            labels=[self.labels[i] for i in idx],
            values=self.values[idx] if idx else np.empty((0, self.dim)),
        )


@dataclass(frozen=True)
class SplitSpec:
    """Per-class split sizes; test_per_class=None means all remaining rows."""

    train_per_class: int
    test_per_class: int | None
    seed: int

    def __post_init__(self):
        if self.train_per_class < 1:
            raise DataInvariantError("train_per_class must be >= 1")
        if self.test_per_class is not None and self.test_per_class < 1:
            raise DataInvariantError("test_per_class must be >= 1 or None for all-remaining")


def _parse_float(token: str, path, line_num: int) -> float:
    try:
        x = float(token)
    except ValueError:
        raise FileFormatError(f"{path}:{line_num}: cannot parse {token!r} as a number") from None
    if not math.isfinite(x):
        raise FileFormatError(f"{path}:{line_num}: non-finite value {token!r}")
    return x


def _load_features_csv(path: Path) -> FeatureTable:
    ids, labels, rows = [], [], []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise FileFormatError(f"{path}:1: empty file") from None
        if len(header) < 4 or header[0] != "id" or header[1] != "label":
            raise FileFormatError(
                f"{path}:1: malformed header, expected id,label,f0,...,f{{D-1}}"
            )
        dim = len(header) - 2
        expected = [f"f{i}" for i in range(dim)]
        if header[2:] != expected:
            raise FileFormatError(
                f"{path}:1: malformed header, feature columns must be f0..f{dim - 1}"
            )
        for row in reader:
            if not row:
                continue
            line = reader.line_num
            if len(row) != dim + 2:
                raise FileFormatError(
                    f"{path}:{line}: expected {dim + 2} fields, got {len(row)}"
                )
            ids.append(row[0])
            labels.append(row[1])
            rows.append([_parse_float(tok, path, line) for tok in row[2:]])
    values = np.asarray(rows, dtype=np.float64) if rows else np.empty((0, dim))
    try:
        return FeatureTable(ids=ids, labels=labels, values=values)
    except DataInvariantError as e:
        raise FileFormatError(f"{path}: {e}") from None


def _read_exact(fh, count: int, path, what: str) -> bytes:
    data = fh.read(count)
    if len(data) != count:
        raise FileFormatError(f"{path}: truncated file while reading {what}")
    return data


def _load_features_binary(path: Path) -> FeatureTable:
    with open(path, "rb") as fh:
        magic = _read_exact(fh, 4, path, "magic")
        if magic != FTB_MAGIC:
            raise FileFormatError(f"{path}: bad magic {magic!r}")
        dim, count = struct.unpack("<IQ", _read_exact(fh, 12, path, "header"))
        ids, labels = [], []
        for r in range(count):
            for dest in (ids, labels):
                (ln,) = struct.unpack("<I", _read_exact(fh, 4, path, f"row {r} string length"))
                dest.append(_read_exact(fh, ln, path, f"row {r} string").decode("utf-8"))
        raw = _read_exact(fh, count * dim * 8, path, "value matrix")
        if fh.read(1):
            raise FileFormatError(f"{path}: trailing bytes after value matrix")
    values = np.frombuffer(raw, dtype="<f8").reshape(count, dim).astype(np.float64)
    try:
        return FeatureTable(ids=ids, labels=labels, values=values)
    except DataInvariantError as e:
        raise FileFormatError(f"{path}: {e}") from None


def load_features(path) -> FeatureTable:
    """Load a feature table, sniffing CSV vs FTB1 binary from the content."""
    path = Path(path)
    with open(path, "rb") as fh:
        head = fh.read(4)
    if head == FTB_MAGIC:
        return _load_features_binary(path)
    return _load_features_csv(path)


def save_features(table: FeatureTable, path, fmt: str | None = None) -> None:
    """Write a feature table as CSV or FTB1 binary.

    fmt=None infers from the suffix: .ftb/.ftb1 mean binary, anything else CSV.
    """
    path = Path(path)
    if fmt is None:
        fmt = "ftb1" if path.suffix in (".ftb", ".ftb1") else "csv"
    if fmt == "csv":
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["id", "label"] + [f"f{i}" for i in range(table.dim)])
            for rid, label, vec in table.rows():
                writer.writerow([rid, label] + [repr(float(x)) for x in vec])
    elif fmt == "ftb1":
        with open(path, "wb") as fh:
            fh.write(FTB_MAGIC)
            fh.write(struct.pack("<IQ", table.dim, len(table)))
            for rid, label, _ in table.rows():
                for text in (rid, label):
                    raw = text.encode("utf-8")
                    fh.write(struct.pack("<I", len(raw)))
                    fh.write(raw)
            fh.write(np.ascontiguousarray(table.values, dtype="<f8").tobytes())
    else:
        raise ValueError(f"unknown format {fmt!r}, expected 'csv' or 'ftb1'")


def _split_generator(seed: int, class_index: int) -> np.random.Generator:
    key = np.array([seed & 0xFFFFFFFFFFFFFFFF, class_index], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def _bounded_draw(gen: np.random.Generator, bound: int) -> int:
    # rejection sampling keeps the draw uniform and portable
    limit = (2**64 // bound) * bound
    while True:
        r = int(gen.integers(0, 2**64, dtype=np.uint64))
        if r < limit:
            return r % bound


def _fisher_yates(n: int, gen: np.random.Generator) -> list[int]:
    idx = list(range(n))
    for i in range(n - 1, 0, -1):
        j = _bounded_draw(gen, i + 1)
        idx[i], idx[j] = idx[j], idx[i]
    return idx


def split(
    table: FeatureTable, spec: SplitSpec, allow_small_classes: bool = False
) -> tuple[FeatureTable, FeatureTable]:
    """Deterministic per-class split into train and test tables.

    Each class's rows are shuffled with a seeded generator; the first
    train_per_class go to train, the next test_per_class (or all remaining)
    to test. Classes with too few rows raise unless allow_small_classes is
    set, in which case all their rows become training data and the class is
    excluded from test. Row order within the outputs follows the input table.
    """
    labels = sorted(set(table.labels))
    by_class: dict[str, list[int]] = {l: [] for l in labels}
    for i, label in enumerate(table.labels):
        by_class[label].append(i)
    small = [l for l in labels if len(by_class[l]) <= spec.train_per_class]
    if small and not allow_small_classes:
        raise DataInvariantError(
            "classes with too few rows for train_per_class="
            f"{spec.train_per_class}: {', '.join(small)}"
        )
    train_idx: list[int] = []
    test_idx: list[int] = []
    small_set = set(small)
    for ci, label in enumerate(labels):
        rows = by_class[label]
        if label in small_set:
            train_idx.extend(rows)
            continue
        perm = _fisher_yates(len(rows), _split_generator(spec.seed, ci))
        shuffled = [rows[j] for j in perm]
        train_idx.extend(shuffled[: spec.train_per_class])
        rest = shuffled[spec.train_per_class :]
        take = len(rest) if spec.test_per_class is None else min(spec.test_per_class, len(rest))
        test_idx.extend(rest[:take])
    train_idx.sort()
    test_idx.sort()
    return table.subset(train_idx), table.subset(test_idx)


def _bank_scalar_count(bank: MemoryBank) -> int:
    total = bank.n * len(bank.core_patterns)
    if bank.thresholds is not None:
        total += bank.n
    return total


def save_bank(bank: MemoryBank, path) -> None:
    """Persist a bank as deterministic JSON (plus a binary sidecar if large)."""
    path = Path(path)
    doc = {
        "format": BANK_FORMAT,
        "version": BANK_VERSION,
        "n": bank.n,
        "mode": bank.mode,
        "k_per_class": bank.k_per_class,
    }
    use_sidecar = _bank_scalar_count(bank) > SIDECAR_LIMIT
    blob = bytearray()

    def emit(vec: np.ndarray):
        if not use_sidecar:
            return [float(x) for x in vec]
        offset = len(blob) // 8
        blob.extend(np.ascontiguousarray(vec, dtype="<f8").tobytes())
        return {"offset": offset, "length": int(vec.size)}

    doc["thresholds"] = emit(bank.thresholds) if bank.thresholds is not None else None
    doc["core_patterns"] = [
        {
            "id": cp.id,
            "class_id": cp.class_id,
            "member_count": cp.member_count,
            "values": emit(cp.values.values),
        }
        for cp in bank.core_patterns
    ]
    if use_sidecar:
        sidecar = path.name + ".bin"
        doc["sidecar"] = sidecar
        with open(path.parent / sidecar, "wb") as fh:
            fh.write(bytes(blob))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(doc, fh, sort_keys=True, separators=(",", ":"))
        fh.write("\n")


def load_bank(path) -> MemoryBank:
    """Load a bank written by save_bank, rejecting unknown versions."""
    path = Path(path)
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except (json.JSONDecodeError, UnicodeDecodeError) as e:
        raise FileFormatError(f"{path}: corrupt bank document: {e}") from None
    if not isinstance(doc, dict) or doc.get("format") != BANK_FORMAT:
        raise FileFormatError(f"{path}: not a memory bank document")
    if doc.get("version") != BANK_VERSION:
        raise FileFormatError(
            f"{path}: unsupported bank version {doc.get('version')!r}, expected {BANK_VERSION}"
        )
    sidecar_data = None
    if "sidecar" in doc:
        sidecar_path = path.parent / doc["sidecar"]
        try:
            raw = sidecar_path.read_bytes()
        except OSError as e:
            raise FileFormatError(f"{path}: cannot read sidecar: {e}") from None
        sidecar_data = np.frombuffer(raw, dtype="<f8")

    def fetch(ref, what: str) -> np.ndarray:
        if isinstance(ref, list):
            return np.asarray(ref, dtype=np.float64)
        if isinstance(ref, dict) and sidecar_data is not None:
            lo, ln = int(ref.get("offset", -1)), int(ref.get("length", -1))
            if lo < 0 or ln < 0 or lo + ln > sidecar_data.size:
                raise FileFormatError(f"{path}: sidecar reference for {what} out of range")
            return np.array(sidecar_data[lo : lo + ln], dtype=np.float64)
        raise FileFormatError(f"{path}: malformed array for {what}")

    try:
        mode = doc["mode"]
        thresholds = doc["thresholds"]
        if thresholds is not None:
            thresholds = fetch(thresholds, "thresholds")
        cores = [
            CorePattern(
                id=str(item["id"]),
                class_id=str(item["class_id"]),
                values=Pattern(fetch(item["values"], f"core pattern {item.get('id')!r}"), mode),
                member_count=int(item["member_count"]),
            )
            for item in doc["core_patterns"]
        ]
        return MemoryBank(
            n=int(doc["n"]),
            mode=mode,
            core_patterns=cores,
            thresholds=thresholds,
            k_per_class=int(doc["k_per_class"]),
        )
    except (KeyError, TypeError, ValueError) as e:
        raise FileFormatError(f"{path}: malformed bank document: {e}") from None
