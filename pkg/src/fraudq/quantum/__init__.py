"""Dense quantum-circuit simulation and the quantum-backed classifiers."""

from .simulator import MAX_QUBITS, Circuit, Gate, StateVector, apply_gate, expval_z, run_circuit
from .circuits import ansatz, feature_map

__all__ = [
    "MAX_QUBITS",
    "Circuit",
    "Gate",
    "StateVector",
    "apply_gate",
    "expval_z",
    "run_circuit",
    "ansatz",
    "feature_map",
]
