"""Parameter-shift differentiation of Z expectations.

For a rotation angle theta, d<Z>/dtheta = [f(theta + pi/2) - f(theta - pi/2)] / 2
exactly. When one parameter or feature index is bound to several gates, the
gradient is the sum of the shift rule applied to each occurrence separately,
which is the chain rule for a repeated angle.
"""

import math

import numpy as np

from .simulator import ROTATION_KINDS, StateVector, apply_gate, expval_z

_SHIFT = math.pi / 2


def _run_shifted(circuit, params, features, shift_pos, delta):
    """Run the circuit with ``delta`` added to the angle of one gate position."""
    state = StateVector.zero(circuit.n_qubits)
    for pos, gate in enumerate(circuit.gates):
        if gate.kind in ROTATION_KINDS:
            if gate.angle is not None:
                angle = gate.angle
            elif gate.param_index >= 0:
                angle = params[gate.param_index]
            else:
                angle = features[gate.feature_index]
            if pos == shift_pos:
                angle = angle + delta
            apply_gate(state, gate, float(angle))
        else:
            apply_gate(state, gate)
    return state


def expectation(circuit, params=None, features=None, qubit=0):
    """<Z_qubit> after running the circuit; the function the shift rule differentiates."""
    params = np.zeros(0) if params is None else np.asarray(params, dtype=np.float64)
    features = np.zeros(0) if features is None else np.asarray(features, dtype=np.float64)
    return expval_z(_run_shifted(circuit, params, features, -1, 0.0), qubit)


def _shift_grad(circuit, params, features, qubit, positions_per_index, n_indices):
    grad = np.zeros(n_indices)
    for index in range(n_indices):
        total = 0.0
        for pos in positions_per_index.get(index, ()):
            up = expval_z(_run_shifted(circuit, params, features, pos, _SHIFT), qubit)
            down = expval_z(_run_shifted(circuit, params, features, pos, -_SHIFT), qubit)
            total += (up - down) / 2.0
        grad[index] = total
    return grad


def param_shift_grad(circuit, params, features=None, qubit=0):
    """Gradient of <Z_qubit> with respect to every trainable parameter."""
    params = np.asarray(params, dtype=np.float64)
    features = np.zeros(0) if features is None else np.asarray(features, dtype=np.float64)
    positions = {}
    for pos, gate in enumerate(circuit.gates):
        if gate.param_index >= 0:
            positions.setdefault(gate.param_index, []).append(pos)
    return _shift_grad(circuit, params, features, qubit, positions, circuit.n_params)


def feature_shift_grad(circuit, params, features, qubit=0):
    """Gradient of <Z_qubit> with respect to every encoding feature angle."""
    params = np.zeros(0) if params is None else np.asarray(params, dtype=np.float64)
    features = np.asarray(features, dtype=np.float64)
    positions = {}
    for pos, gate in enumerate(circuit.gates):
        if gate.feature_index >= 0:
            positions.setdefault(gate.feature_index, []).append(pos)
    return _shift_grad(circuit, params, features, qubit, positions, circuit.n_features)
