from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from ..errors import DimensionMismatch, KTooLarge


class Distance(str, enum.Enum):
    EUCLIDEAN = "euclidean"
    MANHATTAN = "manhattan"


@dataclass
class KnnModel:
    """Lazy learner: keeps the training rows and votes among the k closest."""

    k: int
    X: np.ndarray
    y: np.ndarray
    n_classes: int
    distance: Distance = Distance.EUCLIDEAN

    def distances(self, query) -> np.ndarray:
        q = np.asarray(query, dtype=np.float64)
        if q.shape != (self.X.shape[1],):
            raise DimensionMismatch(f"expected {self.X.shape[1]} features, got shape {q.shape}")
        diff = self.X - q
        if self.distance is Distance.MANHATTAN:
            return np.abs(diff).sum(axis=1)
        return np.sqrt((diff * diff).sum(axis=1))

    def neighbours(self, query) -> tuple[np.ndarray, np.ndarray]:
        d = self.distances(query)
        # stable sort: equal distances admit the lower row index first
        idx = np.argsort(d, kind="stable")[: self.k]
        return idx, d[idx]

    def vote(self, idx, dist) -> tuple[int, np.ndarray]:
        labels = self.y[idx]
        counts = np.bincount(labels, minlength=self.n_classes)
        summed = np.bincount(labels, weights=dist, minlength=self.n_classes)
        tied = np.flatnonzero(counts == counts.max())
        winner = tied[np.argmin(summed[tied])]
        return int(winner), counts

    def predict(self, X) -> np.ndarray:
        X = np.atleast_2d(X)
        return np.array([knn_predict(self, q)[0] for q in X], dtype=np.int64)

    def scores(self, X) -> np.ndarray:
        """Vote share of each class among the k neighbours."""
        X = np.atleast_2d(X)
        out = np.empty((X.shape[0], self.n_classes))
        for i, q in enumerate(X):
            out[i] = self.vote(*self.neighbours(q))[1] / self.k
        return out

    def get_params(self) -> dict:
        return {"X": self.X.tolist(), "y": self.y.tolist()}

    def hyperparameters(self) -> dict:
        return {"k": self.k, "distance": self.distance.value, "n_classes": self.n_classes}

    @classmethod
    def from_params(cls, hyper: dict, params: dict) -> "KnnModel":
        return cls(
            k=int(hyper["k"]),
            X=np.asarray(params["X"], dtype=np.float64),
            y=np.asarray(params["y"], dtype=np.int64),
            n_classes=int(hyper["n_classes"]),
            distance=Distance(hyper["distance"]),
        )


def knn_fit(train, k: int = 5, distance=Distance.EUCLIDEAN) -> KnnModel:
    n = len(train)
    if n == 0:
        raise ValueError("empty training set")
    if not 1 <= k <= n:
        raise KTooLarge(f"k={k} but only {n} training rows")
    return KnnModel(
        k=k,
        X=train.features.copy(),
        y=train.labels.copy(),
        n_classes=train.n_classes,
        distance=Distance(distance),
    )


def knn_predict(model: KnnModel, query) -> tuple[int, np.ndarray]:
    """Majority vote of the k nearest rows.

    Vote ties go to the class with the smaller summed neighbour distance,
    then to the lower class index. Returns the class and the neighbour
    distances in ascending order.
    """
    idx, dist = model.neighbours(query)
    return model.vote(idx, dist)[0], dist
