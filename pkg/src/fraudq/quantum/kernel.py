"""Fidelity kernel: k(x, z) = |<psi(z)|psi(x)>|^2 with psi the feature-map
state.

Every entry is evaluated the way a quantum device evaluates it: one composed
circuit per pair (encode x, un-encode z, probability of the all-zeros
outcome). A Gram matrix therefore costs n(n-1)/2 circuit runs and a cross
block m*n, which is what makes kernel models far slower to train and score
than the classical ensembles. The diagonal is 1 by construction and is not
re-evaluated.
"""

import numpy as np

from ..errors import WidthMismatchError
from .circuits import feature_map
from .simulator import Circuit, Gate, run_circuit


def _bound_map(circuit, features):
    """Copy of a feature-map circuit with every rotation angle filled in."""
    out = Circuit(circuit.n_qubits)
    for g in circuit.gates:
        if g.feature_index >= 0:
            out.add(Gate(g.kind, g.target, angle=float(features[g.feature_index])))
        else:
            out.add(g)
    return out


def _overlap_probability(forward, backward):
    """P(all zeros) after running ``forward`` then ``backward`` on |0...0>."""
    state = run_circuit(forward.concat(backward))
    return float(np.abs(state.amplitudes[0]) ** 2)


def kernel_value(x, z, repetitions=1):
    """Squared overlap of two feature-map states; symmetric, k(x, x) = 1."""
    x = np.asarray(x, dtype=np.float64)
    z = np.asarray(z, dtype=np.float64)
    if x.shape != z.shape:
        raise WidthMismatchError(f"kernel inputs differ in width: {x.shape} vs {z.shape}")
    template = feature_map(x.shape[-1], repetitions)
    return _overlap_probability(_bound_map(template, np.ravel(x)),
                                _bound_map(template, np.ravel(z)).inverse())


def kernel_matrix(X, repetitions=1):
    """Gram matrix of the fidelity kernel: symmetric, unit diagonal, PSD."""
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    template = feature_map(X.shape[1], repetitions)
    forward = [_bound_map(template, row) for row in X]
    backward = [c.inverse() for c in forward]
    n = X.shape[0]
    gram = np.eye(n)
    for i in range(n):
        for j in range(i + 1, n):
            gram[i, j] = gram[j, i] = _overlap_probability(forward[i], backward[j])
    return gram


def kernel_cross(X, Z, repetitions=1):
    """Rectangular kernel block k(X_i, Z_j), rows over X."""
    if Z is X:
        return kernel_matrix(X, repetitions)
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    Z = np.atleast_2d(np.asarray(Z, dtype=np.float64))
    if X.shape[1] != Z.shape[1]:
        raise WidthMismatchError(f"kernel inputs differ in width: {X.shape[1]} vs {Z.shape[1]}")
    template = feature_map(X.shape[1], repetitions)
    forward = [_bound_map(template, row) for row in X]
    backward = [_bound_map(template, row).inverse() for row in Z]
    block = np.empty((X.shape[0], Z.shape[0]))
    for i, f in enumerate(forward):
        for j, b in enumerate(backward):
            block[i, j] = _overlap_probability(f, b)
    return block
