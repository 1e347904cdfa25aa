"""Uniform predictor interface and the versioned model artifact format.

Every trained model exposes predict_proba over rows and classifies at the
0.5 threshold, ties to positive. Artifacts are JSON with a format tag and
version; floats survive the round trip bit-exactly via repr semantics.
"""

import json

import numpy as np

from .. import MODEL_FORMAT_VERSION
from ..errors import DimensionMismatchError

ARTIFACT_FORMAT = "fraudq-model"

_REGISTRY = {}


def register(kind):
    def wrap(cls):
        cls.kind = kind
        _REGISTRY[kind] = cls
        return cls

    return wrap


def sigmoid(z):
    """Numerically stable logistic function, scalar or array."""
    z = np.asarray(z, dtype=np.float64)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out if out.ndim else float(out)


class TrainedModel:
    """Base: fit-produced, immutable afterwards, serializable."""

    kind = None
    engine = "classical"
    schema_version = None

    def predict_proba(self, X):
        raise NotImplementedError

    def predict(self, X):
        """(probabilities, hard labels); label = probability >= 0.5."""
        proba = np.asarray(self.predict_proba(X))
        return proba, (proba >= 0.5).astype(np.int64)

    def to_payload(self):
        raise NotImplementedError

    @classmethod
    def from_payload(cls, payload):
        raise NotImplementedError

    def check_width(self, X, expected):
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        if X.shape[1] != expected:
            raise DimensionMismatchError(f"expected {expected} features, got {X.shape[1]}")
        return X


def predict(model, x):
    """Single-row convenience: (probability, hard label)."""
    proba, labels = model.predict(np.atleast_2d(x))
    return float(proba[0]), int(labels[0])


def save_model(model, path):
    doc = {
        "format": ARTIFACT_FORMAT,
        "format_version": MODEL_FORMAT_VERSION,
        "kind": model.kind,
        "schema_version": model.schema_version,
        "payload": model.to_payload(),
    }
    with open(path, "w", encoding="utf-8") as out:
        json.dump(doc, out)
        out.write("\n")


def load_model(path):
    with open(path, encoding="utf-8") as handle:
        doc = json.load(handle)
    if doc.get("format") != ARTIFACT_FORMAT:
        raise ValueError(f"{path} is not a model artifact")
    if doc["format_version"] > MODEL_FORMAT_VERSION:
        raise ValueError(f"artifact version {doc['format_version']} is newer than supported")
    cls = _REGISTRY.get(doc["kind"])
    if cls is None:
        raise ValueError(f"unknown model kind {doc['kind']!r}")
    model = cls.from_payload(doc["payload"])
    model.schema_version = doc.get("schema_version")
    return model


def fit_platt_scale(scores, labels, iterations=100):
    """One-parameter decision-value calibration: p = sigmoid(a * score).

    Newton iterations on the scale; enough for monotone calibration of SVM
    decision values, which is all the hard-label threshold needs.
    """
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.float64)
    a = 1.0
    for _ in range(iterations):
        p = sigmoid(a * scores)
        grad = float(np.dot(p - labels, scores))
        hess = float(np.dot(p * (1.0 - p), scores * scores))
        if hess < 1e-12:
            break
        step = grad / hess
        a -= step
        a = min(max(a, -100.0), 100.0)
        if abs(step) < 1e-10:
            break
    return a
