"""One-vs-rest logistic regression trained by full-batch gradient descent."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import DimensionMismatch, NonFiniteLoss, SingleClass


def sigmoid(z):
    """Logistic function, evaluated without overflow for any finite input."""
    z = np.asarray(z, dtype=np.float64)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out if out.ndim else float(out)


def one_hot(y, n_classes: int) -> np.ndarray:
    return np.eye(n_classes)[np.asarray(y, dtype=np.int64)]


def logreg_loss_grad(W, b, X, Y):
    """Mean binary cross-entropy per class and its gradient.

    ``W`` is ``(n_features, n_classes)``, ``Y`` the one-hot targets. Returns
    ``(loss_per_class, grad_W, grad_b)``.
    """
    Z = X @ W + b
    # softplus(z) - y*z == -[y log s + (1-y) log(1-s)]
    loss = (np.logaddexp(0.0, Z) - Y * Z).mean(axis=0)
    resid = sigmoid(Z) - Y
    n = X.shape[0]
    return loss, X.T @ resid / n, resid.sum(axis=0) / n


@dataclass
class LogRegModel:
    W: np.ndarray
    b: np.ndarray
    learning_rate: float = 0.1
    epochs: int = 500
    loss_history: np.ndarray = field(default_factory=lambda: np.zeros((0, 0)))

    @property
    def n_classes(self) -> int:
        return self.b.size

    def scores(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        if X.shape[1] != self.W.shape[0]:
            raise DimensionMismatch(f"expected {self.W.shape[0]} features, got {X.shape[1]}")
        return sigmoid(X @ self.W + self.b)

    def predict(self, X) -> np.ndarray:
        return np.argmax(self.scores(X), axis=1)

    def get_params(self) -> dict:
        return {"W": self.W.tolist(), "b": self.b.tolist()}

    def hyperparameters(self) -> dict:
        return {"learning_rate": self.learning_rate, "epochs": self.epochs}

    @classmethod
    def from_params(cls, hyper: dict, params: dict) -> "LogRegModel":
        return cls(
            W=np.asarray(params["W"], dtype=np.float64).reshape(-1, len(params["b"])),
            b=np.asarray(params["b"], dtype=np.float64),
            learning_rate=float(hyper["learning_rate"]),
            epochs=int(hyper["epochs"]),
        )


def logreg_fit(train, learning_rate: float = 0.1, epochs: int = 500) -> LogRegModel:
    """Fit one binary sigmoid classifier per class, starting from zero weights.

    ``loss_history[e]`` holds the per-class training loss before update ``e``;
    the final row is the loss of the returned parameters.
    """
    if np.unique(train.labels).size < 2:
        raise SingleClass("logistic regression needs at least two classes")
    X = train.features
    Y = one_hot(train.labels, train.n_classes)
    W = np.zeros((X.shape[1], train.n_classes))
    b = np.zeros(train.n_classes)
    history = np.empty((epochs + 1, train.n_classes))
    for epoch in range(epochs):
        loss, gW, gb = logreg_loss_grad(W, b, X, Y)
        history[epoch] = loss
        W -= learning_rate * gW
        b -= learning_rate * gb
    history[epochs] = logreg_loss_grad(W, b, X, Y)[0]
    if not np.all(np.isfinite(history)):
        raise NonFiniteLoss("logistic regression loss became non-finite")
    return LogRegModel(W, b, learning_rate, epochs, history)


def logreg_predict(model: LogRegModel, query) -> tuple[int, np.ndarray]:
    """Arg-max of the raw per-class sigmoid scores (ties -> lower index)."""
    q = np.asarray(query, dtype=np.float64)
    if q.shape != (model.W.shape[0],):
        raise DimensionMismatch(f"expected {model.W.shape[0]} features, got shape {q.shape}")
    s = model.scores(q[None, :])[0]
    return int(np.argmax(s)), s
