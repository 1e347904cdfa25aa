"""Hybrid classifier: classical encoder, quantum hidden layer, classical head.

The encoder is a stack of affine+tanh layers (one by default) whose outputs
map to rotation angles pi*(t+1)/2 in [0, pi]. The quantum layer angle-encodes
those, runs the trainable fragment and reads <Z_i> on every qubit; an affine
head plus sigmoid produces the fraud probability. All three blocks train
jointly on binary cross-entropy: circuit parameters and encoding angles get
exact shift-rule gradients, classical blocks the ordinary chain rule.
"""

import numpy as np

from ..errors import SingleClassError, WidthMismatchError
from ..models.base import TrainedModel, register, sigmoid
from .circuits import ansatz, feature_map
from .optim import Adam
from .variational import SHIFT, encode_batch, expvals_all, fragment_pass

PROB_FLOOR = 1e-12


def _encoder_shapes(n_features_in, n_qubits, encoder_layers):
    widths = [n_features_in] + [n_qubits] * encoder_layers
    return list(zip(widths[:-1], widths[1:]))


@register("hqnn")
class HqnnModel(TrainedModel):
    engine = "quantum"

    def __init__(self, params, n_features_in, n_qubits, layers, encoder_layers=1,
                 repetitions=1, input_mean=None, input_std=None, loss_history=None):
        self.n_features_in = n_features_in
        self.n_qubits = n_qubits
        self.layers = layers
        self.encoder_layers = encoder_layers
        self.repetitions = repetitions
        self.encoder_shapes = _encoder_shapes(n_features_in, n_qubits, encoder_layers)
        self._ansatz = ansatz(n_qubits, layers)
        self.params = np.asarray(params, dtype=np.float64)
        expected = (sum(a * b + b for a, b in self.encoder_shapes)
                    + n_qubits + 1 + self._ansatz.n_params)
        if self.params.size != expected:
            raise WidthMismatchError(
                f"parameter vector has {self.params.size} entries, expected {expected}")
        self.input_mean = np.zeros(n_features_in) if input_mean is None else np.asarray(input_mean, dtype=np.float64)
        self.input_std = np.ones(n_features_in) if input_std is None else np.asarray(input_std, dtype=np.float64)
        self.loss_history = loss_history

    @property
    def circuit(self):
        """Full unbound circuit (angle encoder then trainable fragment)."""
        return feature_map(self.n_qubits, self.repetitions).concat(self._ansatz)

    def _unpack(self, params):
        pos = 0
        encoder = []
        for a, b in self.encoder_shapes:
            weight = params[pos:pos + a * b].reshape(a, b)
            pos += a * b
            bias = params[pos:pos + b]
            pos += b
            encoder.append((weight, bias))
        head_w = params[pos:pos + self.n_qubits]
        pos += self.n_qubits
        head_b = params[pos]
        pos += 1
        return encoder, head_w, head_b, params[pos:]

    def _standardize(self, X):
        return (X - self.input_mean) / self.input_std

    def _z_values(self, angles, theta, shift_index=-1, delta=0.0):
        amps = encode_batch(angles, self.repetitions)
        fragment_pass(self._ansatz, theta, amps, shift_index, delta)
        return expvals_all(amps, self.n_qubits)

    def _forward(self, x_std, params):
        """Probability plus the intermediates the backward pass reuses."""
        encoder, head_w, head_b, theta = self._unpack(params)
        hidden = [x_std]
        h = x_std
        for weight, bias in encoder:
            h = np.tanh(h @ weight + bias)
            hidden.append(h)
        angles = 0.5 * np.pi * (h + 1.0)
        z = self._z_values(angles, theta)
        p = sigmoid(z @ head_w + head_b)
        return p, z, angles, hidden

    def predict_proba(self, X):
        X = self.check_width(X, self.n_features_in)
        return self._forward(self._standardize(X), self.params)[0]

    def loss(self, X, y, params=None):
        """Mean binary cross-entropy of the forward pass."""
        params = self.params if params is None else np.asarray(params, dtype=np.float64)
        X = self.check_width(X, self.n_features_in)
        y = np.asarray(y, dtype=np.float64)
        p = self._forward(self._standardize(X), params)[0]
        p = np.clip(p, PROB_FLOOR, 1.0 - PROB_FLOOR)
        return float(-np.mean(y * np.log(p) + (1.0 - y) * np.log(1.0 - p)))

    def gradient(self, X, y, params=None):
        """Flat loss gradient over every trainable block."""
        params = self.params if params is None else np.asarray(params, dtype=np.float64)
        X = self.check_width(X, self.n_features_in)
        y = np.asarray(y, dtype=np.float64)
        return self._grad(self._standardize(X), y, params)[1]

    def _grad(self, x_std, y, params):
        encoder, head_w, _, theta = self._unpack(params)
        p, z, angles, hidden = self._forward(x_std, params)
        rows = y.size

        clipped = np.clip(p, PROB_FLOOR, 1.0 - PROB_FLOOR)
        loss = float(-np.mean(y * np.log(clipped) + (1.0 - y) * np.log(1.0 - clipped)))

        g_score = (p - y) / rows
        g_head_w = z.T @ g_score
        g_head_b = float(np.sum(g_score))
        g_z = g_score[:, None] * head_w[None, :]

        encoded = encode_batch(angles, self.repetitions)
        g_theta = np.empty(theta.size)
        for j in range(theta.size):
            plus = encoded.copy()
            minus = encoded.copy()
            fragment_pass(self._ansatz, theta, plus, j, SHIFT)
            fragment_pass(self._ansatz, theta, minus, j, -SHIFT)
            dz = (expvals_all(plus, self.n_qubits) - expvals_all(minus, self.n_qubits)) / 2.0
            g_theta[j] = float(np.sum(g_z * dz))

        g_angles = np.empty_like(angles)
        for k in range(self.n_qubits):
            shifted = angles.copy()
            shifted[:, k] += SHIFT
            z_plus = self._z_values(shifted, theta)
            shifted = angles.copy()
            shifted[:, k] -= SHIFT
            z_minus = self._z_values(shifted, theta)
            g_angles[:, k] = np.sum(g_z * (z_plus - z_minus) / 2.0, axis=1)

        g_h = g_angles * (np.pi / 2.0)
        encoder_grads = []
        for layer in reversed(range(len(encoder))):
            weight, _ = encoder[layer]
            t_out = hidden[layer + 1]
            g_u = g_h * (1.0 - t_out * t_out)
            encoder_grads.append((hidden[layer].T @ g_u, g_u.sum(axis=0)))
            g_h = g_u @ weight.T
        encoder_grads.reverse()

        flat = np.concatenate(
            [np.concatenate([gw.ravel(), gb]) for gw, gb in encoder_grads]
            + [g_head_w, [g_head_b], g_theta]
        )
        return loss, flat

    @classmethod
    def fit(cls, X, y, n_qubits=4, layers=1, epochs=30, batch_size=32,
            learning_rate=0.01, seed=0, encoder_layers=1, repetitions=1):
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        y = np.asarray(y, dtype=np.float64)
        if np.unique(y).size < 2:
            raise SingleClassError("training labels contain a single class")
        mean = X.mean(axis=0)
        std = X.std(axis=0)
        std[std == 0.0] = 1.0

        rng = np.random.default_rng(seed)
        shapes = _encoder_shapes(X.shape[1], n_qubits, encoder_layers)
        total = (sum(a * b + b for a, b in shapes)
                 + n_qubits + 1 + ansatz(n_qubits, layers).n_params)
        params = rng.uniform(-0.1, 0.1, size=total)
        model = cls(params, X.shape[1], n_qubits, layers, encoder_layers=encoder_layers,
                    repetitions=repetitions, input_mean=mean, input_std=std)
        optimizer = Adam(total, learning_rate=learning_rate)

        x_std = model._standardize(X)
        n_rows = x_std.shape[0]
        loss_history = []
        for _ in range(epochs):
            order = rng.permutation(n_rows)
            epoch_loss = 0.0
            for start in range(0, n_rows, batch_size):
                idx = order[start:start + batch_size]
                batch_loss, grad = model._grad(x_std[idx], y[idx], params)
                epoch_loss += batch_loss * idx.size
                params = optimizer.step(params, grad)
            loss_history.append(epoch_loss / n_rows)

        model.params = params
        model.loss_history = loss_history
        return model

    def to_payload(self):
        return {
            "n_features_in": self.n_features_in,
            "n_qubits": self.n_qubits,
            "layers": self.layers,
            "encoder_layers": self.encoder_layers,
            "repetitions": self.repetitions,
            "params": self.params.tolist(),
            "input_mean": self.input_mean.tolist(),
            "input_std": self.input_std.tolist(),
            "circuit": self.circuit.to_payload(),
        }

    @classmethod
    def from_payload(cls, payload):
        return cls(
            np.asarray(payload["params"], dtype=np.float64),
            payload["n_features_in"],
            payload["n_qubits"],
            payload["layers"],
            encoder_layers=payload["encoder_layers"],
            repetitions=payload["repetitions"],
            input_mean=payload["input_mean"],
            input_std=payload["input_std"],
        )
