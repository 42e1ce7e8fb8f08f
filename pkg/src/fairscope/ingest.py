"""Dataset loading, preprocessing and fold planning.

The pipeline is: ``load_csv`` parses a headered CSV against a ``Schema``
(categorical cells stay raw strings), ``preprocess`` applies the cleaning
rules (leakage drops, missing-row drops, non-positive-target drops, binary
label encoding, top-percentile target trim) and ``make_folds`` produces a
deterministic k-fold plan.
"""

from __future__ import annotations

import csv
import hashlib
import json
import shutil
import urllib.error
import urllib.request
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

from .errors import DataError, DigestError, NetworkError, SchemaError

KIND_NUMERIC = "numeric"
KIND_BINARY = "categorical-binary"
KIND_TARGET = "target"
KIND_DROPPED = "dropped"
_KINDS = (KIND_NUMERIC, KIND_BINARY, KIND_TARGET, KIND_DROPPED)

#: catch-all key in a binary encoding; matches any label not listed explicitly
ENCODING_WILDCARD = "*"


@dataclass(frozen=True)
class ColumnSpec:
    """How one CSV column is typed and cleaned."""

    name: str
    kind: str
    encoding: Mapping[str, int] | None = None
    missing_markers: tuple[str, ...] = ()

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise SchemaError(f"column {self.name!r}: unknown kind {self.kind!r}")
        if self.encoding is not None:
            bad = {v for v in self.encoding.values()} - {0, 1}
            if bad:
                raise SchemaError(
                    f"column {self.name!r}: encoding values must be 0 or 1, got {sorted(bad)}"
                )
            if self.kind != KIND_BINARY:
                raise SchemaError(
                    f"column {self.name!r}: encoding only allowed on {KIND_BINARY} columns"
                )
        object.__setattr__(self, "missing_markers", tuple(self.missing_markers))


@dataclass(frozen=True)
class Schema:
    """Ordered column specs plus the list of leakage columns to drop."""

    columns: tuple[ColumnSpec, ...]
    leakage_drops: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "columns", tuple(self.columns))
        object.__setattr__(self, "leakage_drops", tuple(self.leakage_drops))
        targets = [c.name for c in self.columns if c.kind == KIND_TARGET]
        if len(targets) != 1:
            raise SchemaError(f"schema must declare exactly one target column, got {targets}")
        names = [c.name for c in self.columns]
        if len(set(names)) != len(names):
            raise SchemaError("schema has duplicate column names")

    @property
    def target_name(self) -> str:
        return next(c.name for c in self.columns if c.kind == KIND_TARGET)

    def column(self, name: str) -> ColumnSpec:
        for c in self.columns:
            if c.name == name:
                return c
        raise SchemaError(f"schema has no column named {name!r}")

    @classmethod
    def from_json(cls, path: str | Path) -> "Schema":
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
        return cls.from_dict(doc)

    @classmethod
    def from_dict(cls, doc: Mapping) -> "Schema":
        cols = []
        for c in doc["columns"]:
            cols.append(
                ColumnSpec(
                    name=c["name"],
                    kind=c["kind"],
                    encoding={k: int(v) for k, v in c["encoding"].items()}
                    if c.get("encoding")
                    else None,
                    missing_markers=tuple(c.get("missing_markers", ())),
                )
            )
        return cls(columns=tuple(cols), leakage_drops=tuple(doc.get("leakage_drops", ())))

    def to_dict(self) -> dict:
        cols = []
        for c in self.columns:
            entry: dict = {"name": c.name, "kind": c.kind}
            if c.encoding is not None:
                entry["encoding"] = dict(c.encoding)
            if c.missing_markers:
                entry["missing_markers"] = list(c.missing_markers)
            cols.append(entry)
        return {"columns": cols, "leakage_drops": list(self.leakage_drops)}


@dataclass(frozen=True)
class PreprocessSummary:
    """Per-rule drop counters from one preprocess pass."""

    rows_in: int
    rows_out: int
    missing_dropped: int
    nonpositive_dropped: int
    outlier_dropped: int
    outlier_cutoff: float

    @property
    def total_dropped(self) -> int:
        return self.missing_dropped + self.nonpositive_dropped + self.outlier_dropped


@dataclass(frozen=True, eq=False)
class Frame:
    """Immutable column-major table: named feature columns plus a target.

    Raw frames (straight out of ``load_csv``) may hold object-dtype columns
    with unencoded string labels; preprocessed frames hold float64 columns
    only. ``group_labels`` preserves the original 0/1 values of binary
    columns so that grouping survives alternation.
    """

    feature_names: tuple[str, ...]
    columns: tuple[np.ndarray, ...]
    target: np.ndarray
    target_name: str = "target"
    binary_columns: frozenset = frozenset()
    group_labels: Mapping[str, np.ndarray] | None = None
    summary: PreprocessSummary | None = None

    def __post_init__(self):
        if len(self.feature_names) != len(self.columns):
            raise DataError("feature_names and columns length mismatch")
        n = len(self.target)
        for name, col in zip(self.feature_names, self.columns):
            if len(col) != n:
                raise DataError(f"column {name!r} has length {len(col)}, expected {n}")

    @property
    def n_rows(self) -> int:
        return len(self.target)

    @property
    def n_features(self) -> int:
        return len(self.feature_names)

    def column_index(self, name: str) -> int:
        try:
            return self.feature_names.index(name)
        except ValueError:
            raise DataError(f"frame has no column named {name!r}") from None

    def column(self, name: str) -> np.ndarray:
        return self.columns[self.column_index(name)]

    def group_values(self, name: str) -> np.ndarray:
        """Original 0/1 labels of a binary column, ignoring any alternation."""
        if self.group_labels is not None and name in self.group_labels:
            return self.group_labels[name]
        return self.column(name)

    def feature_matrix(self) -> np.ndarray:
        """n x m float64 matrix in feature order; requires encoded columns."""
        if not self.columns:
            return np.empty((self.n_rows, 0))
        try:
            return np.column_stack([np.asarray(c, dtype=np.float64) for c in self.columns])
        except (TypeError, ValueError) as exc:
            raise DataError(f"frame still holds unencoded columns: {exc}") from exc

    def take(self, indices: np.ndarray) -> "Frame":
        """Row subset (used for fold train/test views)."""
        indices = np.asarray(indices)
        return Frame(
            feature_names=self.feature_names,
            columns=tuple(c[indices] for c in self.columns),
            target=self.target[indices],
            target_name=self.target_name,
            binary_columns=self.binary_columns,
            group_labels=None
            if self.group_labels is None
            else {k: v[indices] for k, v in self.group_labels.items()},
            summary=self.summary,
        )

    def replace_column(self, name: str, values: np.ndarray) -> "Frame":
        """New frame with one feature column swapped out; group labels kept."""
        j = self.column_index(name)
        cols = list(self.columns)
        cols[j] = np.asarray(values)
        return Frame(
            feature_names=self.feature_names,
            columns=tuple(cols),
            target=self.target,
            target_name=self.target_name,
            binary_columns=self.binary_columns,
            group_labels=self.group_labels,
            summary=self.summary,
        )

    def equals(self, other: "Frame") -> bool:
        """Field-for-field equality, arrays compared elementwise."""
        if self.feature_names != other.feature_names:
            return False
        if self.target_name != other.target_name:
            return False
        if self.binary_columns != other.binary_columns:
            return False
        if not np.array_equal(self.target, other.target):
            return False
        return all(np.array_equal(a, b) for a, b in zip(self.columns, other.columns))


@dataclass(frozen=True)
class FoldPlan:
    """k-fold assignment: each sample belongs to exactly one test fold."""

    k: int
    assignment: np.ndarray

    def __post_init__(self):
        counts = np.bincount(self.assignment, minlength=self.k)
        if len(counts) != self.k or counts.min() == 0:
            raise DataError("fold plan does not cover all folds")
        if counts.max() - counts.min() > 1:
            raise DataError("fold sizes differ by more than 1")

    @property
    def n_samples(self) -> int:
        return len(self.assignment)

    def test_indices(self, fold: int) -> np.ndarray:
        return np.nonzero(self.assignment == fold)[0]

    def train_indices(self, fold: int) -> np.ndarray:
        return np.nonzero(self.assignment != fold)[0]


def load_csv(path: str | Path, schema: Schema) -> Frame:
    """Parse a headered CSV into a raw Frame typed per schema.

    Numeric and target cells are parsed to float (missing markers become
    NaN); binary columns with an explicit encoding stay raw strings until
    ``preprocess``; binary columns without an encoding are parsed as
    already-encoded numerics.
    """
    path = Path(path)
    if not path.exists():
        raise DataError(f"data file not found: {path}")
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"empty CSV: {path}") from None
        header = [h.strip() for h in header]
        schema_names = {c.name for c in schema.columns}
        if set(header) != schema_names:
            missing = sorted(schema_names - set(header))
            extra = sorted(set(header) - schema_names)
            raise DataError(
                f"header mismatch in {path}: missing columns {missing}, unexpected {extra}"
            )
        rows = list(reader)

    n = len(rows)
    col_pos = {name: header.index(name) for name in header}
    feature_names = []
    columns = []
    target = None
    binary = set()
    for spec in schema.columns:
        j = col_pos[spec.name]
        raw = [rows[i][j].strip() for i in range(n)]
        parse_numeric = spec.kind in (KIND_NUMERIC, KIND_TARGET) or (
            spec.kind == KIND_BINARY and spec.encoding is None
        )
        if parse_numeric:
            out = np.empty(n, dtype=np.float64)
            markers = set(spec.missing_markers)
            for i, cell in enumerate(raw):
                if cell in markers or cell == "":
                    out[i] = np.nan
                    continue
                try:
                    out[i] = float(cell)
                except ValueError:
                    raise DataError(
                        f"unparseable numeric cell {cell!r} at row {i + 2}, "
                        f"column {spec.name!r}"
                    ) from None
        else:
            out = np.array(raw, dtype=object)
        if spec.kind == KIND_TARGET:
            target = out
        else:
            feature_names.append(spec.name)
            columns.append(out)
            if spec.kind == KIND_BINARY:
                binary.add(spec.name)
    assert target is not None  # schema guarantees one target
    return Frame(
        feature_names=tuple(feature_names),
        columns=tuple(columns),
        target=target,
        target_name=schema.target_name,
        binary_columns=frozenset(binary),
    )


def write_csv(frame: Frame, path: str | Path) -> None:
    """Write a frame back to CSV; floats use repr so a reload is bit-exact."""

    def fmt(v) -> str:
        if isinstance(v, (float, np.floating)):
            return repr(float(v))
        return str(v)

    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(list(frame.feature_names) + [frame.target_name])
        for i in range(frame.n_rows):
            writer.writerow([fmt(c[i]) for c in frame.columns] + [fmt(frame.target[i])])


def _encode_binary(col: np.ndarray, spec: ColumnSpec) -> np.ndarray:
    if col.dtype != object:
        return np.asarray(col, dtype=np.float64)
    if spec.encoding is None:
        raise DataError(
            f"column {spec.name!r} holds raw labels but the schema declares no encoding"
        )
    wildcard = spec.encoding.get(ENCODING_WILDCARD)
    out = np.empty(len(col), dtype=np.float64)
    for i, label in enumerate(col):
        if label in spec.encoding:
            out[i] = spec.encoding[label]
        elif wildcard is not None:
            out[i] = wildcard
        else:
            raise DataError(
                f"label {label!r} in column {spec.name!r} is not covered by the encoding"
            )
    return out


def _is_missing(col: np.ndarray, markers: Iterable[str]) -> np.ndarray:
    if col.dtype == object:
        markers = list(markers)
        if not markers:
            return np.zeros(len(col), dtype=bool)
        return np.isin(col, markers)
    return ~np.isfinite(np.asarray(col, dtype=np.float64))


#: fraction of the target distribution kept by the outlier trim
OUTLIER_PERCENTILE = 99.0


def preprocess(frame: Frame, schema: Schema) -> Frame:
    """Apply the cleaning pipeline and return a new, fully numeric Frame.

    Steps, in order: drop leakage/dropped columns; drop rows with a missing
    marker in any kept column or in the target; drop rows with target <= 0;
    encode binary columns to {0, 1}; drop rows whose target strictly exceeds
    the 99th percentile (linear interpolation) of the remaining targets.

    The trim is defined against the incoming population, so a frame that
    already carries a preprocess summary is not trimmed again; this makes
    preprocess idempotent.
    """
    drop_names = set(schema.leakage_drops) | {
        c.name for c in schema.columns if c.kind == KIND_DROPPED
    }
    kept_specs = [
        schema.column(name) for name in frame.feature_names if name not in drop_names
    ]
    if not kept_specs:
        raise DataError("no feature columns remain after leakage drops")

    cols = {s.name: frame.column(s.name) for s in kept_specs}
    target = np.asarray(frame.target, dtype=np.float64)

    missing = ~np.isfinite(target)
    for s in kept_specs:
        missing |= _is_missing(cols[s.name], s.missing_markers)
    n_missing = int(missing.sum())
    keep = ~missing

    nonpositive = keep & (target <= 0)
    n_nonpositive = int(nonpositive.sum())
    keep &= target > 0

    idx = np.nonzero(keep)[0]
    target = target[idx]
    encoded = {}
    for s in kept_specs:
        col = cols[s.name][idx]
        if s.kind == KIND_BINARY:
            col = _encode_binary(col, s)
            bad = set(np.unique(col)) - {0.0, 1.0}
            if bad:
                raise DataError(
                    f"binary column {s.name!r} contains non-binary values {sorted(bad)}"
                )
        else:
            col = np.asarray(col, dtype=np.float64)
        encoded[s.name] = col

    if len(target) == 0:
        raise DataError("preprocessing removed every row")

    if frame.summary is None:
        cutoff = float(np.percentile(target, OUTLIER_PERCENTILE, method="linear"))
        inliers = target <= cutoff
        n_outliers = int(len(target) - inliers.sum())
        target = target[inliers]
        encoded = {k: v[inliers] for k, v in encoded.items()}
        if len(target) == 0:
            raise DataError("preprocessing removed every row")
    else:
        cutoff = frame.summary.outlier_cutoff
        n_outliers = 0

    names = tuple(s.name for s in kept_specs)
    binary = frozenset(s.name for s in kept_specs if s.kind == KIND_BINARY)
    summary = PreprocessSummary(
        rows_in=frame.n_rows,
        rows_out=len(target),
        missing_dropped=n_missing,
        nonpositive_dropped=n_nonpositive,
        outlier_dropped=n_outliers,
        outlier_cutoff=cutoff,
    )
    return Frame(
        feature_names=names,
        columns=tuple(encoded[n] for n in names),
        target=target,
        target_name=frame.target_name,
        binary_columns=binary,
        group_labels={name: encoded[name].copy() for name in binary},
        summary=summary,
    )


def make_folds(n_samples: int, k: int, seed: int) -> FoldPlan:
    """Seeded shuffle then contiguous partition into k near-equal folds."""
    if k < 2:
        raise DataError(f"k must be >= 2, got {k}")
    if n_samples < k:
        raise DataError(f"need at least k={k} samples, got {n_samples}")
    rng = np.random.default_rng(seed)
    perm = rng.permutation(n_samples)
    assignment = np.empty(n_samples, dtype=np.int64)
    base, extra = divmod(n_samples, k)
    start = 0
    for fold in range(k):
        size = base + (1 if fold < extra else 0)
        assignment[perm[start : start + size]] = fold
        start += size
    return FoldPlan(k=k, assignment=assignment)


def sha256_of(path: str | Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def fetch_dataset(url: str, sha256: str, dest: str | Path) -> Path:
    """Download url to dest and verify its sha256; cached files are reused."""
    dest = Path(dest)
    expected = sha256.lower()
    if dest.exists():
        actual = sha256_of(dest)
        if actual == expected:
            return dest
        raise DigestError(
            f"cached file {dest} has digest {actual}, expected {expected}"
        )
    dest.parent.mkdir(parents=True, exist_ok=True)
    tmp = dest.with_suffix(dest.suffix + ".part")
    try:
        with urllib.request.urlopen(url) as resp, open(tmp, "wb") as out:
            shutil.copyfileobj(resp, out)
    except (urllib.error.URLError, OSError) as exc:
        tmp.unlink(missing_ok=True)
        raise NetworkError(f"download failed for {url}: {exc}") from exc
    actual = sha256_of(tmp)
    if actual != expected:
        tmp.unlink(missing_ok=True)
        raise DigestError(f"downloaded file has digest {actual}, expected {expected}")
    tmp.replace(dest)
    return dest
