"""Support-vector classifier over the state-fidelity kernel.

Raw features are standardized, projected to one dimension per qubit and
scaled to rotation angles; the dual problem is then solved on the fidelity
Gram matrix exactly like any other precomputed-kernel SVM. Prediction
evaluates kernel rows against the stored support vectors.
"""

import numpy as np

from ..errors import SingleClassError
from ..models.base import TrainedModel, register
from ..models.svm import KernelSvmModel
from .circuits import feature_map
from .preprocess import QuantumPreprocessor


@register("qsvm")
class QsvmModel(TrainedModel):
    engine = "quantum"

    def __init__(self, preprocessor, svm, n_qubits, repetitions, n_features_in):
        self.preprocessor = preprocessor
        self.svm = svm
        self.n_qubits = n_qubits
        self.repetitions = repetitions
        self.n_features_in = n_features_in

    @classmethod
    def fit(cls, X, y, n_qubits=4, C=1.0, repetitions=1, tol=1e-3, max_iter=None):
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        y = np.asarray(y, dtype=np.int64)
        if np.unique(y).size < 2:
            raise SingleClassError("training labels contain a single class")
        preprocessor = QuantumPreprocessor(n_qubits)
        angles = preprocessor.fit_transform(X)
        svm = KernelSvmModel.fit(
            angles, y, C=C, kernel="fidelity", tol=tol,
            repetitions=repetitions, max_iter=max_iter,
        )
        return cls(preprocessor, svm, n_qubits, repetitions, X.shape[1])

    def decision_scores(self, X):
        X = self.check_width(X, self.n_features_in)
        return self.svm.decision_scores(self.preprocessor.transform(X))

    def predict_proba(self, X):
        X = self.check_width(X, self.n_features_in)
        return self.svm.predict_proba(self.preprocessor.transform(X))

    def to_payload(self):
        return {
            "n_features_in": self.n_features_in,
            "n_qubits": self.n_qubits,
            "repetitions": self.repetitions,
            "circuit": feature_map(self.n_qubits, self.repetitions).to_payload(),
            "preprocessor": self.preprocessor.to_payload(),
            "svm": self.svm.to_payload(),
        }

    @classmethod
    def from_payload(cls, payload):
        return cls(
            QuantumPreprocessor.from_payload(payload["preprocessor"]),
            KernelSvmModel.from_payload(payload["svm"]),
            payload["n_qubits"],
            payload["repetitions"],
            payload["n_features_in"],
        )
