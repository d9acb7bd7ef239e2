"""Versioned JSON model files.

Floats are written with Python's shortest round-trip repr, so a saved model
reloads to bit-identical parameters.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..errors import CorruptModelFile, DimensionMismatch, UnsupportedVersion
from ..preprocess import ScalerParams, scale_matrix
from .forest import ForestModel
from .knn import KnnModel
from .logreg import LogRegModel
from .mlp import MlpModel

FORMAT_VERSION = 1

MODEL_CLASSES = {
    "knn": KnnModel,
    "logreg": LogRegModel,
    "forest": ForestModel,
    "mlp": MlpModel,
}


@dataclass
class TrainedModel:
    kind: str
    model: KnnModel | LogRegModel | ForestModel | MlpModel
    label_names: list[str]
    feature_names: list[str]
    scaler: ScalerParams | None = None
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in MODEL_CLASSES:
            raise ValueError(f"unknown model kind {self.kind!r}")
        if self.model.n_classes != len(self.label_names):
            raise DimensionMismatch(
                f"model has {self.model.n_classes} outputs but {len(self.label_names)} labels"
            )

    def transform(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        if X.shape[1] != len(self.feature_names):
            raise DimensionMismatch(
                f"model expects {len(self.feature_names)} features, got {X.shape[1]}"
            )
        return scale_matrix(X, self.scaler) if self.scaler is not None else X

    def predict(self, X) -> np.ndarray:
        """Class indices for raw (unscaled) feature rows."""
        return self.model.predict(self.transform(X))

    def scores(self, X) -> np.ndarray:
        return self.model.scores(self.transform(X))

    def to_document(self) -> dict:
        return {
            "format_version": FORMAT_VERSION,
            "model_kind": self.kind,
            "hyperparameters": self.model.hyperparameters(),
            "parameters": self.model.get_params(),
            "scaler_params": self.scaler.to_dict() if self.scaler is not None else None,
            "label_names": list(self.label_names),
            "feature_schema": list(self.feature_names),
            "training_metadata": self.metadata,
        }

    @classmethod
    def from_document(cls, doc: dict) -> "TrainedModel":
        version = doc.get("format_version")
        if version != FORMAT_VERSION:
            raise UnsupportedVersion(f"model format version {version!r}, expected {FORMAT_VERSION}")
        kind = doc["model_kind"]
        if kind not in MODEL_CLASSES:
            raise CorruptModelFile(f"unknown model kind {kind!r}")
        model = MODEL_CLASSES[kind].from_params(doc["hyperparameters"], doc["parameters"])
        scaler = doc.get("scaler_params")
        return cls(
            kind=kind,
            model=model,
            label_names=list(doc["label_names"]),
            feature_names=list(doc["feature_schema"]),
            scaler=ScalerParams.from_dict(scaler) if scaler else None,
            metadata=dict(doc.get("training_metadata") or {}),
        )


def dumps_model(model: TrainedModel) -> str:
    return json.dumps(model.to_document(), sort_keys=True, allow_nan=False, separators=(",", ":")) + "\n"


def save_model(model: TrainedModel, path) -> None:
    Path(path).write_text(dumps_model(model), encoding="utf-8")


def load_model(path) -> TrainedModel:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except FileNotFoundError:
        raise CorruptModelFile(f"model file {path} not found") from None
    except (OSError, UnicodeDecodeError) as exc:
        raise CorruptModelFile(f"cannot read model file {path}: {exc}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CorruptModelFile(f"{path} is not a valid model file: {exc}") from None
    if not isinstance(doc, dict):
        raise CorruptModelFile(f"{path} is not a valid model file")
    try:
        return TrainedModel.from_document(doc)
    except (UnsupportedVersion, CorruptModelFile):
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise CorruptModelFile(f"{path}: malformed model document ({exc})") from None
