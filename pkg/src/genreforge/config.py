"""Run configuration: one flat ``key = value`` TOML file per experiment."""

from __future__ import annotations

import dataclasses
import sys
from dataclasses import dataclass, fields

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .features import AnalysisConfig
from .models import Distance
from .preprocess import ScalerKind


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    # analysis
    frame_length: int = 2048
    hop_length: int = 512
    window: str = "hann"
    n_mels: int = 40
    n_mfcc: int = 20
    fmin_hz: float = 0.0
    fmax_hz: float | None = None
    rolloff_p: float = 0.85
    chroma_f_ref_hz: float = 32.703
    chroma_fmin_hz: float = 20.0
    segment_s: float = 30.0
    # split and scaling
    val_fraction: float = 0.2
    seed: int = 42
    scaler: str = "standard"
    # models
    knn_k: int = 5
    knn_distance: str = "euclidean"
    logreg_learning_rate: float = 0.1
    logreg_epochs: int = 500
    forest_n_estimators: int = 1000
    forest_max_depth: int = 10
    mlp_hidden_layout: tuple[int, ...] = (256, 128, 64)
    mlp_learning_rate: float = 0.01
    mlp_epochs: int = 200
    mlp_batch_size: int = 32

    def __post_init__(self):
        if not 0 < self.val_fraction < 1:
            raise ConfigError("val_fraction must lie in (0, 1)")
        try:
            ScalerKind(self.scaler)
            Distance(self.knn_distance)
            self.analysis()
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        object.__setattr__(self, "mlp_hidden_layout", tuple(int(h) for h in self.mlp_hidden_layout))
        positive = ("knn_k", "logreg_epochs", "forest_n_estimators", "forest_max_depth",
                    "mlp_epochs", "mlp_batch_size", "logreg_learning_rate", "mlp_learning_rate")
        for name in positive:
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be positive")
        if any(h < 1 for h in self.mlp_hidden_layout):
            raise ConfigError("mlp_hidden_layout entries must be positive")

    def analysis(self) -> AnalysisConfig:
        names = {f.name for f in fields(AnalysisConfig)}
        return AnalysisConfig(**{k: getattr(self, k) for k in names})

    def hyperparameters(self, kind: str) -> dict:
        if kind == "knn":
            return {"k": self.knn_k, "distance": self.knn_distance}
        if kind == "logreg":
            return {"learning_rate": self.logreg_learning_rate, "epochs": self.logreg_epochs}
        if kind == "forest":
            return {"n_estimators": self.forest_n_estimators,
                    "max_depth": self.forest_max_depth, "seed": self.seed}
        if kind == "mlp":
            return {
                "hidden_layout": self.mlp_hidden_layout,
                "learning_rate": self.mlp_learning_rate,
                "epochs": self.mlp_epochs,
                "batch_size": self.mlp_batch_size,
                "seed": self.seed,
            }
        raise ConfigError(f"unknown model kind {kind!r}")

    def updated(self, values: dict) -> "RunConfig":
        return dataclasses.replace(self, **_coerce(values))


_FIELDS = {f.name: f for f in fields(RunConfig)}


def _coerce(values: dict) -> dict:
    unknown = sorted(set(values) - set(_FIELDS))
    if unknown:
        raise ConfigError(f"unknown config key(s): {', '.join(unknown)}")
    out = {}
    for key, value in values.items():
        default = _FIELDS[key].default
        if isinstance(default, bool) or isinstance(value, bool):
            raise ConfigError(f"{key}: booleans are not accepted")
        if isinstance(default, float) and isinstance(value, int):
            value = float(value)
        elif default is None and isinstance(value, int):
            value = float(value)
        elif isinstance(default, tuple):
            if not isinstance(value, (list, tuple)):
                raise ConfigError(f"{key} must be a list of integers")
            value = tuple(value)
        if default is None and not isinstance(value, float):
            raise ConfigError(f"{key} expects a number")
        if default is not None and not isinstance(value, type(default)):
            raise ConfigError(f"{key} expects {type(default).__name__}, got {type(value).__name__}")
        out[key] = value
    return out


def parse_assignment(text: str) -> dict:
    """Parse one ``key=value`` override using TOML value syntax.

    Bare words that are not valid TOML are taken as strings, so
    ``scaler=minmax`` works without quoting.
    """
    if "=" not in text:
        raise ConfigError(f"expected key=value, got {text!r}")
    key, raw = (s.strip() for s in text.split("=", 1))
    try:
        return tomllib.loads(f"{key} = {raw}")
    except tomllib.TOMLDecodeError:
        return {key: raw}


def load_config(path=None, overrides=None) -> RunConfig:
    values = {}
    if path is not None:
        try:
            with open(path, "rb") as fh:
                values = tomllib.load(fh)
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"{path}: {exc}") from None
        nested = [k for k, v in values.items() if isinstance(v, dict)]
        if nested:
            raise ConfigError(f"{path}: config must be flat, found table(s) {', '.join(nested)}")
    values.update(overrides or {})
    return RunConfig().updated(values)


def dump_config(cfg: RunConfig) -> str:
    lines = []
    for f in fields(cfg):
        value = getattr(cfg, f.name)
        if value is None:
            continue
        if isinstance(value, str):
            lines.append(f'{f.name} = "{value}"')
        elif isinstance(value, tuple):
            lines.append(f"{f.name} = [{', '.join(str(v) for v in value)}]")
        else:
            lines.append(f"{f.name} = {value!r}")
    return "\n".join(lines) + "\n"
