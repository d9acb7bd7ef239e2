"""Datasets, feature scaling and stratified train/validation splits."""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ClassTooSmall, DimensionMismatch, SchemaMismatch


@dataclass
class Dataset:
    features: np.ndarray
    labels: np.ndarray
    label_names: list[str]
    feature_names: list[str]
    row_ids: list[str] = field(default_factory=list)

    def __post_init__(self):
        self.features = np.atleast_2d(np.asarray(self.features, dtype=np.float64))
        self.labels = np.asarray(self.labels, dtype=np.int64)
        n = self.features.shape[0]
        if self.labels.shape != (n,):
            raise DimensionMismatch(f"{n} feature rows but {self.labels.size} labels")
        if self.features.shape[1] != len(self.feature_names):
            raise DimensionMismatch(
                f"{self.features.shape[1]} columns but {len(self.feature_names)} feature names"
            )
        if n and (self.labels.min() < 0 or self.labels.max() >= len(self.label_names)):
            raise DimensionMismatch("label index outside label_names")
        if not self.row_ids:
            self.row_ids = [str(i) for i in range(n)]

    def __len__(self):
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]

    @property
    def n_classes(self) -> int:
        return len(self.label_names)

    def subset(self, idx) -> "Dataset":
        idx = np.asarray(idx, dtype=np.int64)
        return Dataset(
            self.features[idx],
            self.labels[idx],
            list(self.label_names),
            list(self.feature_names),
            [self.row_ids[i] for i in idx],
        )


class ScalerKind(str, enum.Enum):
    STANDARD = "standard"
    MINMAX = "minmax"


@dataclass
class ScalerParams:
    """Per-column statistics: (mean, std) for standard, (min, max) for min-max."""

    kind: ScalerKind
    a: np.ndarray
    b: np.ndarray

    def to_dict(self) -> dict:
        return {"kind": self.kind.value, "a": self.a.tolist(), "b": self.b.tolist()}

    @classmethod
    def from_dict(cls, d: dict) -> "ScalerParams":
        return cls(ScalerKind(d["kind"]), np.asarray(d["a"], float), np.asarray(d["b"], float))


def _matrix(data) -> np.ndarray:
    return data.features if isinstance(data, Dataset) else np.atleast_2d(np.asarray(data, float))


def fit_scaler(data, kind=ScalerKind.STANDARD) -> ScalerParams:
    X = _matrix(data)
    if X.shape[0] < 1:
        raise ValueError("cannot fit a scaler on zero rows")
    kind = ScalerKind(kind)
    if kind is ScalerKind.STANDARD:
        return ScalerParams(kind, X.mean(axis=0), X.std(axis=0))
    return ScalerParams(kind, X.min(axis=0), X.max(axis=0))


def scale_matrix(X, params: ScalerParams) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    if X.shape[-1] != params.a.size:
        raise DimensionMismatch(f"scaler fitted on {params.a.size} features, got {X.shape[-1]}")
    if params.kind is ScalerKind.STANDARD:
        offset, span = params.a, params.b
    else:
        offset, span = params.a, params.b - params.a
    out = np.zeros_like(X)
    live = span > 0
    out[..., live] = (X[..., live] - offset[live]) / span[live]
    return out


def apply_scaler(data: Dataset, params: ScalerParams) -> Dataset:
    return replace(data, features=scale_matrix(data.features, params), row_ids=list(data.row_ids))


def stratified_indices(labels, val_fraction: float = 0.2, seed: int = 42):
    """Row indices ``(train, val)`` for a per-class seeded split, each sorted."""
    if not 0 < val_fraction < 1:
        raise ValueError("val_fraction must lie in (0, 1)")
    labels = np.asarray(labels)
    rng = np.random.default_rng(seed)
    train, val = [], []
    for cls in np.unique(labels):
        rows = np.flatnonzero(labels == cls)
        if rows.size < 2:
            raise ClassTooSmall(f"class {cls} has {rows.size} sample(s); need at least 2")
        n_val = math.floor(val_fraction * rows.size + 0.5)
        n_val = min(max(n_val, 1), rows.size - 1)
        rows = rng.permutation(rows)
        val.extend(rows[:n_val])
        train.extend(rows[n_val:])
    return np.sort(np.array(train, dtype=np.int64)), np.sort(np.array(val, dtype=np.int64))


def stratified_split(data: Dataset, val_fraction: float = 0.2, seed: int = 42):
    train_idx, val_idx = stratified_indices(data.labels, val_fraction, seed)
    return data.subset(train_idx), data.subset(val_idx)


def encode_labels(names) -> tuple[np.ndarray, list[str]]:
    vocab = sorted(set(names))
    index = {name: i for i, name in enumerate(vocab)}
    return np.array([index[n] for n in names], dtype=np.int64), vocab


def write_feature_csv(path, rows, feature_names) -> None:
    """``rows`` is an iterable of ``(path, label, values)``."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["path", "label", *feature_names])
        for src, label, values in rows:
            writer.writerow([src, label, *(f"{v:.9g}" for v in values)])


def read_feature_csv(path, expected_names=None) -> Dataset:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaMismatch(f"{path} is empty") from None
        if header[:2] != ["path", "label"]:
            raise SchemaMismatch("feature CSV must start with 'path,label' columns")
        names = header[2:]
        if expected_names is not None and names != list(expected_names):
            raise SchemaMismatch("feature CSV columns do not match the expected schema")
        paths, labels, values = [], [], []
        for lineno, row in enumerate(reader, start=2):
            if len(row) != len(header):
                raise SchemaMismatch(f"line {lineno}: expected {len(header)} fields, got {len(row)}")
            paths.append(row[0])
            labels.append(row[1])
            try:
                values.append([float(v) for v in row[2:]])
            except ValueError as exc:
                raise SchemaMismatch(f"line {lineno}: {exc}") from None
    if not paths:
        raise SchemaMismatch(f"{path} has no data rows")
    y, vocab = encode_labels(labels)
    return Dataset(np.array(values), y, vocab, names, paths)
