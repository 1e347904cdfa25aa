"""Batched circuit execution for the variational trainers.

The simulator's batch helpers apply one shared gate to every row; training
additionally needs per-row encoding angles (each sample binds its own
features) and parameter-shifted passes of the trainable fragment. Everything
here mutates C-contiguous (rows, 2**n) amplitude batches in place.
"""

import numpy as np

from ..errors import QubitIndexError, WidthMismatchError
from .circuits import entangler
from .simulator import apply_gate_batch, expval_z_batch, zero_states

SHIFT = np.pi / 2.0


def rotate_rows_y(amps, qubit, angles):
    """RY on ``qubit`` with one angle per batch row, in place."""
    if not amps.flags.c_contiguous:
        raise ValueError("batch must be C-contiguous for in-place gate application")
    rows, dim = amps.shape
    block = 1 << qubit
    if qubit < 0 or 2 * block > dim:
        raise QubitIndexError(f"qubit {qubit} out of range for batch width {dim}")
    angles = np.asarray(angles, dtype=np.float64)
    if angles.shape != (rows,):
        raise WidthMismatchError(f"need {rows} angles, got shape {angles.shape}")
    view = amps.reshape(rows, -1, 2, block)
    c = np.cos(0.5 * angles)[:, None, None]
    s = np.sin(0.5 * angles)[:, None, None]
    a0 = view[:, :, 0, :]
    a1 = view[:, :, 1, :]
    new0 = c * a0 - s * a1
    new1 = s * a0 + c * a1
    view[:, :, 0, :] = new0
    view[:, :, 1, :] = new1
    return amps


def encode_batch(angles, repetitions=1):
    """Angle-encode rows of ``angles``: per-row RY per qubit, then the ring.

    Matches running the feature map on each row individually; returns a
    (rows, 2**q) batch.
    """
    angles = np.atleast_2d(np.asarray(angles, dtype=np.float64))
    rows, n_qubits = angles.shape
    amps = zero_states(n_qubits, rows)
    ring = entangler(n_qubits).gates
    for _ in range(repetitions):
        for k in range(n_qubits):
            rotate_rows_y(amps, k, angles[:, k])
        for gate in ring:
            apply_gate_batch(amps, gate)
    return amps


def fragment_pass(circuit, params, amps, shift_index=-1, delta=0.0):
    """Apply a trainable fragment to a batch in place.

    Rotation gates read their angle from ``params`` by parameter index;
    ``shift_index``/``delta`` offset one parameter for shift-rule passes.
    """
    for g in circuit.gates:
        if g.kind == "CNOT":
            apply_gate_batch(amps, g)
        elif g.param_index >= 0:
            angle = params[g.param_index]
            if g.param_index == shift_index:
                angle = angle + delta
            apply_gate_batch(amps, g, angle=angle)
        elif g.angle is not None:
            apply_gate_batch(amps, g)
        else:
            raise WidthMismatchError("fragment contains an unbound non-parameter gate")
    return amps


def expvals_all(amps, n_qubits):
    """Per-row <Z_i> for every qubit, as a (rows, n_qubits) array."""
    return np.stack([expval_z_batch(amps, i) for i in range(n_qubits)], axis=1)
