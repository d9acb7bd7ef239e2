"""Accuracy, confusion matrices and the side-by-side classifier report."""

from __future__ import annotations

import csv
import io
import json
import logging
from dataclasses import dataclass, field
from html import escape

import numpy as np

from .errors import EmptyInput, GenreForgeError, IndexOutOfRange, LengthMismatch
from .models import fit_model

log = logging.getLogger(__name__)

DISPLAY_NAMES = {
    "knn": "KNN",
    "logreg": "Logistic Regression",
    "forest": "Random Forest",
    "mlp": "Artificial Neural Network",
}


def _pair(predictions, truth):
    p = np.asarray(predictions, dtype=np.int64).ravel()
    t = np.asarray(truth, dtype=np.int64).ravel()
    if p.size != t.size:
        raise LengthMismatch(f"{p.size} predictions vs {t.size} labels")
    if p.size == 0:
        raise EmptyInput("nothing to evaluate")
    return p, t


def accuracy(predictions, truth) -> float:
    p, t = _pair(predictions, truth)
    return int(np.count_nonzero(p == t)) / p.size


@dataclass
class ConfusionMatrix:
    """Rows are actual classes, columns predicted classes."""

    counts: np.ndarray
    label_names: list[str]

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def accuracy(self) -> float:
        return int(np.trace(self.counts)) / self.total

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["actual\\predicted", *self.label_names])
        for name, row in zip(self.label_names, self.counts):
            writer.writerow([name, *row.tolist()])
        return buf.getvalue()

    def to_svg(self, title: str = "Confusion matrix", cell: int = 60) -> str:
        """Heat map with a count in every cell."""
        n = len(self.label_names)
        left, top = 140, 70
        width, height = left + n * cell + 20, top + n * cell + 110
        peak = max(int(self.counts.max()), 1)
        parts = [
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
            f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">',
            f'<text x="{width / 2}" y="24" text-anchor="middle" font-size="16">{escape(title)}</text>',
            f'<text x="{left + n * cell / 2}" y="{top + n * cell + 95}" text-anchor="middle">Predicted</text>',
            f'<text x="18" y="{top + n * cell / 2}" text-anchor="middle" '
            f'transform="rotate(-90 18 {top + n * cell / 2})">Actual</text>',
        ]
        for i in range(n):
            for j in range(n):
                value = int(self.counts[i, j])
                shade = value / peak
                # white -> dark blue
                r = int(round(255 - shade * 222))
                g = int(round(255 - shade * 153))
                b = int(round(255 - shade * 75))
                fg = "#ffffff" if shade > 0.5 else "#000000"
                x, y = left + j * cell, top + i * cell
                parts.append(
                    f'<rect x="{x}" y="{y}" width="{cell}" height="{cell}" '
                    f'fill="#{r:02x}{g:02x}{b:02x}" stroke="#888888"/>'
                )
                parts.append(
                    f'<text x="{x + cell / 2}" y="{y + cell / 2 + 4}" text-anchor="middle" '
                    f'fill="{fg}">{value}</text>'
                )
        for i, name in enumerate(self.label_names):
            label = escape(name)
            parts.append(
                f'<text x="{left - 8}" y="{top + i * cell + cell / 2 + 4}" text-anchor="end">{label}</text>'
            )
            cx, cy = left + i * cell + cell / 2, top + n * cell + 12
            parts.append(
                f'<text x="{cx}" y="{cy}" text-anchor="end" transform="rotate(-45 {cx} {cy})">{label}</text>'
            )
        parts.append("</svg>")
        return "\n".join(parts) + "\n"


def confusion(predictions, truth, label_names) -> ConfusionMatrix:
    p, t = _pair(predictions, truth)
    n = len(label_names)
    if p.min() < 0 or t.min() < 0 or p.max() >= n or t.max() >= n:
        raise IndexOutOfRange(f"class index outside 0..{n - 1}")
    counts = np.zeros((n, n), dtype=np.int64)
    np.add.at(counts, (t, p), 1)
    return ConfusionMatrix(counts, list(label_names))


@dataclass
class ModelConfig:
    kind: str
    hyperparameters: dict = field(default_factory=dict)


@dataclass
class ReportEntry:
    model_kind: str
    segment_duration_s: float
    hyperparameters: dict
    train_accuracy: float | None = None
    val_accuracy: float | None = None
    confusion: ConfusionMatrix | None = None
    error: str | None = None
    top: bool = False
    model: object = field(default=None, repr=False, compare=False)

    @property
    def ok(self) -> bool:
        return self.error is None

    def to_dict(self) -> dict:
        return {
            "model_kind": self.model_kind,
            "segment_duration_s": self.segment_duration_s,
            "hyperparameters": _jsonable(self.hyperparameters),
            "train_accuracy": self.train_accuracy,
            "val_accuracy": self.val_accuracy,
            "confusion": None
            if self.confusion is None
            else {"label_names": self.confusion.label_names, "counts": self.confusion.counts.tolist()},
            "error": self.error,
            "top": self.top,
        }


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


@dataclass
class EvalReport:
    entries: list[ReportEntry]

    @property
    def top(self) -> ReportEntry | None:
        return next((e for e in self.entries if e.top), None)

    def to_dict(self) -> dict:
        return {"entries": [e.to_dict() for e in self.entries]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def to_text(self) -> str:
        header = ("Classifier", "Segment", "Train Accuracy", "Validation Accuracy")
        rows = []
        for e in self.entries:
            name = DISPLAY_NAMES.get(e.model_kind, e.model_kind) + (" *" if e.top else "")
            seg = f"{e.segment_duration_s:g}s"
            if e.ok:
                rows.append((name, seg, f"{100 * e.train_accuracy:.2f}%", f"{100 * e.val_accuracy:.2f}%"))
            else:
                rows.append((name, seg, "failed", e.error))
        widths = [max(len(r[i]) for r in [header, *rows]) for i in range(4)]
        line = "+" + "+".join("-" * (w + 2) for w in widths) + "+"
        fmt = "| " + " | ".join(f"{{:<{w}}}" for w in widths) + " |"
        out = [line, fmt.format(*header), line, *(fmt.format(*r) for r in rows), line]
        if self.top is not None:
            out.append("* highest validation accuracy")
        return "\n".join(out) + "\n"


def compare_models(train, val, configs, segment_duration_s: float = 30.0) -> EvalReport:
    """Fit each config on ``train``, score both partitions, rank by validation accuracy.

    A model that fails to fit is kept in the report with its error message
    and ranked after every successful model.
    """
    configs = list(configs)
    if not configs:
        raise ValueError("compare_models needs at least one model config")
    entries = []
    for cfg in configs:
        entry = ReportEntry(cfg.kind, segment_duration_s, dict(cfg.hyperparameters))
        try:
            model = fit_model(cfg.kind, train, **cfg.hyperparameters)
            entry.train_accuracy = accuracy(model.predict(train.features), train.labels)
            val_pred = model.predict(val.features)
            entry.val_accuracy = accuracy(val_pred, val.labels)
            entry.confusion = confusion(val_pred, val.labels, val.label_names)
            entry.model = model
        except GenreForgeError as exc:
            log.warning("%s failed: %s: %s", cfg.kind, type(exc).__name__, exc)
            entry.error = f"{type(exc).__name__}: {exc}"
        entries.append(entry)

    # sorted() is stable, so equal accuracies keep config order
    ranked = sorted(entries, key=lambda e: (not e.ok, -(e.val_accuracy or 0.0)))
    if ranked and ranked[0].ok:
        ranked[0].top = True
    return EvalReport(ranked)
