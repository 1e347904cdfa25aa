"""Standard circuit fragments: the RY angle-encoding feature map and the
hardware-efficient RY/RZ ansatz, both closed by a CNOT entangler."""

from .simulator import Circuit


def _entangle(circuit):
    """CNOT chain i -> i+1 closing into a ring.

    One qubit: nothing to entangle. Two qubits: a single CNOT(0, 1), since
    closing the ring would just apply the reverse pair on the same wires.
    """
    q = circuit.n_qubits
    if q == 1:
        return circuit
    if q == 2:
        return circuit.cnot(0, 1)
    for i in range(q):
        circuit.cnot(i, (i + 1) % q)
    return circuit


def entangler(n_qubits):
    """Standalone CNOT coupling fragment (the ring described above)."""
    return _entangle(Circuit(n_qubits))


def feature_map(n_qubits, repetitions=1):
    """Angle encoder: per repetition, RY(x_i) on each qubit then the entangler.

    Feature index i binds to qubit i; inputs are expected in [0, pi] from the
    quantum preprocessor.
    """
    if repetitions < 1:
        raise ValueError(f"repetitions must be >= 1, got {repetitions}")
    circuit = Circuit(n_qubits)
    for _ in range(repetitions):
        for i in range(n_qubits):
            circuit.ry(i, feature=i)
        _entangle(circuit)
    return circuit


def ansatz(n_qubits, layers):
    """Trainable block: per layer, RY(theta) and RZ(theta') on each qubit then
    the entangler; 2 * n_qubits * layers parameters total."""
    if layers < 1:
        raise ValueError(f"layers must be >= 1, got {layers}")
    circuit = Circuit(n_qubits)
    p = 0
    for _ in range(layers):
        for i in range(n_qubits):
            circuit.ry(i, param=p)
            circuit.rz(i, param=p + 1)
            p += 2
        _entangle(circuit)
    return circuit
