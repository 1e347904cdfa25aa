"""Logistic regression by full-batch gradient descent on standardized
columns; L2 penalty on the weights, never the intercept."""

import numpy as np

from .base import TrainedModel, register, sigmoid


@register("lr")
class LogisticRegressionModel(TrainedModel):
    def __init__(self, weights, intercept, mean, std, loss_history=None):
        self.weights = np.asarray(weights, dtype=np.float64)
        self.intercept = float(intercept)
        self.mean = np.asarray(mean, dtype=np.float64)
        self.std = np.asarray(std, dtype=np.float64)
        self.loss_history = loss_history or []

    @classmethod
    def fit(cls, X, y, learning_rate=0.1, epochs=500, l2=1e-4):
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        y = np.asarray(y, dtype=np.float64)
        mean = X.mean(axis=0)
        std = X.std(axis=0)
        std = np.where(std > 0, std, 1.0)
        Z = (X - mean) / std

        n, d = Z.shape
        w = np.zeros(d)
        b = 0.0
        losses = []
        for _ in range(epochs):
            p = sigmoid(Z @ w + b)
            grad_w = Z.T @ (p - y) / n + l2 * w
            grad_b = float(np.mean(p - y))
            w -= learning_rate * grad_w
            b -= learning_rate * grad_b
            p = np.clip(sigmoid(Z @ w + b), 1e-12, 1.0 - 1e-12)
            losses.append(
                float(-np.mean(y * np.log(p) + (1.0 - y) * np.log(1.0 - p)))
                + 0.5 * l2 * float(w @ w)
            )
        return cls(w, b, mean, std, losses)

    def predict_proba(self, X):
        X = self.check_width(X, self.weights.shape[0])
        Z = (X - self.mean) / self.std
        return sigmoid(Z @ self.weights + self.intercept)

    def to_payload(self):
        return {
            "weights": self.weights.tolist(),
            "intercept": self.intercept,
            "mean": self.mean.tolist(),
            "std": self.std.tolist(),
        }

    @classmethod
    def from_payload(cls, payload):
        return cls(payload["weights"], payload["intercept"], payload["mean"], payload["std"])
