"""Variational classifier: angle-encoded inputs, trainable rotation layers,
probability read off the first qubit.

Training minimizes binary cross-entropy with mini-batch adaptive-moment
descent; gradients of the circuit output come from the exact shift rule.
Sample encodings do not depend on the trainable parameters, so every training
row is encoded once up front and each optimizer step replays only the
trainable fragment on cached amplitude batches.
"""

import numpy as np

from ..errors import SingleClassError, WidthMismatchError
from ..models.base import TrainedModel, register
from .circuits import ansatz, feature_map
from .optim import Adam
from .preprocess import QuantumPreprocessor
from .variational import SHIFT, encode_batch, expvals_all, fragment_pass

PROB_FLOOR = 1e-12


def _bce(probs, labels):
    p = np.clip(probs, PROB_FLOOR, 1.0 - PROB_FLOOR)
    return float(-np.mean(labels * np.log(p) + (1.0 - labels) * np.log(1.0 - p)))


@register("vqc")
class VqcModel(TrainedModel):
    engine = "quantum"

    def __init__(self, params, n_qubits, layers, repetitions=1, preprocessor=None,
                 n_features_in=None, loss_history=None):
        self.params = np.asarray(params, dtype=np.float64)
        self.n_qubits = n_qubits
        self.layers = layers
        self.repetitions = repetitions
        self.preprocessor = preprocessor
        self.n_features_in = n_features_in
        self.loss_history = loss_history
        self._ansatz = ansatz(n_qubits, layers)
        if self.params.size != self._ansatz.n_params:
            raise WidthMismatchError(
                f"parameter vector has {self.params.size} entries, "
                f"expected {self._ansatz.n_params}")

    @property
    def circuit(self):
        """Full unbound circuit (encoder then trainable fragment)."""
        return feature_map(self.n_qubits, self.repetitions).concat(self._ansatz)

    def probabilities_from_angles(self, angles):
        """Fraud probability (1 - <Z_0>)/2 for pre-encoded angle rows."""
        amps = encode_batch(angles, self.repetitions)
        fragment_pass(self._ansatz, self.params, amps)
        z0 = expvals_all(amps, self.n_qubits)[:, 0]
        return (1.0 - z0) / 2.0

    def predict_proba(self, X):
        if self.preprocessor is None:
            return self.probabilities_from_angles(X)
        X = self.check_width(X, self.n_features_in)
        return self.probabilities_from_angles(self.preprocessor.transform(X))

    @classmethod
    def fit(cls, X, y, n_qubits=4, layers=1, epochs=30, batch_size=32,
            learning_rate=0.01, seed=0, repetitions=1):
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        y = np.asarray(y, dtype=np.float64)
        if np.unique(y).size < 2:
            raise SingleClassError("training labels contain a single class")
        preprocessor = QuantumPreprocessor(n_qubits)
        angles = preprocessor.fit_transform(X)
        model = cls.fit_on_angles(
            angles, y, layers=layers, epochs=epochs, batch_size=batch_size,
            learning_rate=learning_rate, seed=seed, repetitions=repetitions,
        )
        model.preprocessor = preprocessor
        model.n_features_in = X.shape[1]
        return model

    @classmethod
    def fit_on_angles(cls, angles, y, layers=1, epochs=30, batch_size=32,
                      learning_rate=0.01, seed=0, repetitions=1):
        """Train directly on encoding angles in [0, pi] (one column per qubit)."""
        angles = np.atleast_2d(np.asarray(angles, dtype=np.float64))
        y = np.asarray(y, dtype=np.float64)
        n_rows, n_qubits = angles.shape
        fragment = ansatz(n_qubits, layers)
        n_params = fragment.n_params
        rng = np.random.default_rng(seed)
        params = rng.uniform(-0.1, 0.1, size=n_params)
        optimizer = Adam(n_params, learning_rate=learning_rate)
        encoded = encode_batch(angles, repetitions)

        loss_history = []
        for _ in range(epochs):
            order = rng.permutation(n_rows)
            epoch_loss = 0.0
            for start in range(0, n_rows, batch_size):
                idx = order[start:start + batch_size]
                batch_y = y[idx]
                z0 = expvals_all(fragment_pass(fragment, params, encoded[idx]), n_qubits)[:, 0]
                p = np.clip((1.0 - z0) / 2.0, PROB_FLOOR, 1.0 - PROB_FLOOR)
                epoch_loss += float(-np.sum(batch_y * np.log(p) + (1.0 - batch_y) * np.log(1.0 - p)))
                # dL/dz0 through p = (1 - z0)/2, averaged over the batch
                dl_dz0 = -0.5 * (p - batch_y) / (p * (1.0 - p)) / idx.size
                grad = np.empty(n_params)
                for j in range(n_params):
                    z_plus = expvals_all(
                        fragment_pass(fragment, params, encoded[idx], j, SHIFT), n_qubits)[:, 0]
                    z_minus = expvals_all(
                        fragment_pass(fragment, params, encoded[idx], j, -SHIFT), n_qubits)[:, 0]
                    grad[j] = dl_dz0 @ ((z_plus - z_minus) / 2.0)
                params = optimizer.step(params, grad)
            loss_history.append(epoch_loss / n_rows)

        return cls(params, n_qubits, layers, repetitions=repetitions,
                   loss_history=loss_history)

    def to_payload(self):
        return {
            "n_features_in": self.n_features_in,
            "n_qubits": self.n_qubits,
            "layers": self.layers,
            "repetitions": self.repetitions,
            "params": self.params.tolist(),
            "circuit": self.circuit.to_payload(),
            "preprocessor": None if self.preprocessor is None else self.preprocessor.to_payload(),
        }

    @classmethod
    def from_payload(cls, payload):
        preprocessor = payload["preprocessor"]
        return cls(
            np.asarray(payload["params"], dtype=np.float64),
            payload["n_qubits"],
            payload["layers"],
            repetitions=payload["repetitions"],
            preprocessor=None if preprocessor is None else QuantumPreprocessor.from_payload(preprocessor),
            n_features_in=payload["n_features_in"],
        )
