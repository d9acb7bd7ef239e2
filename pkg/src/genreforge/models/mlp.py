"""Feed-forward network (ReLU hidden layers, softmax output) trained with
plain mini-batch gradient descent on categorical cross-entropy."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import DimensionMismatch, NonFiniteLoss, SingleClass

RELU = "relu"
SOFTMAX = "softmax"


@dataclass
class Layer:
    W: np.ndarray  # (fan_in, fan_out)
    b: np.ndarray
    activation: str = RELU


def relu(z):
    return np.maximum(z, 0.0)


def softmax(z):
    z = np.asarray(z, dtype=np.float64)
    e = np.exp(z - z.max(axis=-1, keepdims=True))
    return e / e.sum(axis=-1, keepdims=True)


def log_softmax(z):
    shifted = z - z.max(axis=-1, keepdims=True)
    return shifted - np.log(np.exp(shifted).sum(axis=-1, keepdims=True))


def glorot_uniform(fan_in: int, fan_out: int, rng) -> np.ndarray:
    limit = math.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=(fan_in, fan_out))


def init_layers(sizes, rng) -> list[Layer]:
    layers = []
    for i, (fan_in, fan_out) in enumerate(zip(sizes[:-1], sizes[1:])):
        act = SOFTMAX if i == len(sizes) - 2 else RELU
        layers.append(Layer(glorot_uniform(fan_in, fan_out, rng), np.zeros(fan_out), act))
    return layers


def forward(layers, X):
    """Return the output logits and the per-layer inputs needed for backprop."""
    inputs = []
    h = X
    for layer in layers[:-1]:
        inputs.append(h)
        h = relu(h @ layer.W + layer.b)
    inputs.append(h)
    return h @ layers[-1].W + layers[-1].b, inputs


def loss_and_grads(layers, X, y):
    """Mean cross-entropy and ``[(dW, db), ...]`` for every layer."""
    logits, inputs = forward(layers, X)
    n = X.shape[0]
    logp = log_softmax(logits)
    loss = -logp[np.arange(n), y].mean()

    delta = np.exp(logp)
    delta[np.arange(n), y] -= 1.0
    delta /= n
    grads = []
    for i in range(len(layers) - 1, -1, -1):
        a = inputs[i]
        grads.append((a.T @ delta, delta.sum(axis=0)))
        if i:
            # a = relu(z) so relu'(z) is (a > 0)
            delta = (delta @ layers[i].W.T) * (a > 0)
    grads.reverse()
    return float(loss), grads


@dataclass
class MlpModel:
    layers: list[Layer]
    learning_rate: float = 0.01
    epochs: int = 200
    batch_size: int = 32
    seed: int = 42
    loss_curve: list[float] = field(default_factory=list)

    @property
    def n_features(self) -> int:
        return self.layers[0].W.shape[0]

    @property
    def n_classes(self) -> int:
        return self.layers[-1].b.size

    def hidden_layout(self) -> list[int]:
        return [layer.b.size for layer in self.layers[:-1]]

    def scores(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        if X.shape[1] != self.n_features:
            raise DimensionMismatch(f"expected {self.n_features} features, got {X.shape[1]}")
        return softmax(forward(self.layers, X)[0])

    def predict(self, X) -> np.ndarray:
        return np.argmax(self.scores(X), axis=1)

    def get_params(self) -> dict:
        return {
            "layers": [
                {"W": l.W.tolist(), "b": l.b.tolist(), "activation": l.activation}
                for l in self.layers
            ],
            "loss_curve": list(self.loss_curve),
        }

    def hyperparameters(self) -> dict:
        return {
            "hidden_layout": self.hidden_layout(),
            "learning_rate": self.learning_rate,
            "epochs": self.epochs,
            "batch_size": self.batch_size,
            "seed": self.seed,
        }

    @classmethod
    def from_params(cls, hyper: dict, params: dict) -> "MlpModel":
        layers = []
        for d in params["layers"]:
            b = np.asarray(d["b"], dtype=np.float64)
            W = np.asarray(d["W"], dtype=np.float64).reshape(-1, b.size)
            layers.append(Layer(W, b, d["activation"]))
        return cls(
            layers=layers,
            learning_rate=float(hyper["learning_rate"]),
            epochs=int(hyper["epochs"]),
            batch_size=int(hyper["batch_size"]),
            seed=int(hyper["seed"]),
            loss_curve=list(params.get("loss_curve", [])),
        )


def _all_finite(layers) -> bool:
    return all(np.isfinite(l.W).all() and np.isfinite(l.b).all() for l in layers)


def mlp_fit(train, hidden_layout=(256, 128, 64), learning_rate: float = 0.01, epochs: int = 200,
            batch_size: int = 32, seed: int = 42) -> MlpModel:
    """Train with a seeded shuffle every epoch and return the last-epoch weights.

    ``loss_curve[e]`` is the full training-set loss after epoch ``e``.
    """
    if np.unique(train.labels).size < 2:
        raise SingleClass("the network needs at least two classes")
    X, y = train.features, train.labels
    n = X.shape[0]
    rng = np.random.default_rng(seed)
    layers = init_layers([X.shape[1], *hidden_layout, train.n_classes], rng)
    curve = []
    with np.errstate(over="ignore", invalid="ignore"):
        for epoch in range(epochs):
            order = rng.permutation(n)
            for start in range(0, n, batch_size):
                batch = order[start : start + batch_size]
                _, grads = loss_and_grads(layers, X[batch], y[batch])
                for layer, (gW, gb) in zip(layers, grads):
                    layer.W -= learning_rate * gW
                    layer.b -= learning_rate * gb
            loss = loss_and_grads(layers, X, y)[0]
            if not (math.isfinite(loss) and _all_finite(layers)):
                raise NonFiniteLoss(
                    f"training diverged at epoch {epoch} (learning rate {learning_rate} too high?)"
                )
            curve.append(loss)
    return MlpModel(layers, learning_rate, epochs, batch_size, seed, curve)


def mlp_predict(model: MlpModel, query) -> tuple[int, np.ndarray]:
    q = np.asarray(query, dtype=np.float64)
    if q.shape != (model.n_features,):
        raise DimensionMismatch(f"expected {model.n_features} features, got shape {q.shape}")
    p = model.scores(q[None, :])[0]
    return int(np.argmax(p)), p
