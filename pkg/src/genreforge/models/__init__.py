"""The four classifiers and a common ``fit_model`` entry point."""

from .forest import ForestModel, Tree, forest_fit, forest_predict, gini_impurity, tree_fit
from .knn import Distance, KnnModel, knn_fit, knn_predict
from .logreg import LogRegModel, logreg_fit, logreg_loss_grad, logreg_predict, sigmoid
from .mlp import MlpModel, loss_and_grads, mlp_fit, mlp_predict, softmax
from .persist import FORMAT_VERSION, MODEL_CLASSES, TrainedModel, load_model, save_model

MODEL_KINDS = tuple(MODEL_CLASSES)

DEFAULT_HYPERPARAMETERS = {
    "knn": {"k": 5, "distance": "euclidean"},
    "logreg": {"learning_rate": 0.1, "epochs": 500},
    "forest": {"n_estimators": 1000, "max_depth": 10, "seed": 42},
    "mlp": {
        "hidden_layout": (256, 128, 64),
        "learning_rate": 0.01,
        "epochs": 200,
        "batch_size": 32,
        "seed": 42,
    },
}

_FITTERS = {"knn": knn_fit, "logreg": logreg_fit, "forest": forest_fit, "mlp": mlp_fit}


def fit_model(kind: str, train, **hyperparameters):
    """Fit ``kind`` on an already-scaled dataset, defaults filled in."""
    if kind not in _FITTERS:
        raise ValueError(f"unknown model kind {kind!r}; choose from {', '.join(MODEL_KINDS)}")
    params = {**DEFAULT_HYPERPARAMETERS[kind], **hyperparameters}
    return _FITTERS[kind](train, **params)


__all__ = [
    "DEFAULT_HYPERPARAMETERS",
    "Distance",
    "FORMAT_VERSION",
    "ForestModel",
    "KnnModel",
    "LogRegModel",
    "MODEL_KINDS",
    "MlpModel",
    "TrainedModel",
    "Tree",
    "fit_model",
    "forest_fit",
    "forest_predict",
    "gini_impurity",
    "knn_fit",
    "knn_predict",
    "load_model",
    "logreg_fit",
    "logreg_loss_grad",
    "logreg_predict",
    "loss_and_grads",
    "mlp_fit",
    "mlp_predict",
    "save_model",
    "sigmoid",
    "softmax",
    "tree_fit",
]
