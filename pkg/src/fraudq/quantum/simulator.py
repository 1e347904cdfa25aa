"""Dense state-vector circuit simulator.

Little-endian convention throughout: qubit 0 is the least significant bit of
the basis index, so |q_{n-1} ... q_1 q_0> lives at index sum_i q_i * 2^i.
Supported gates: RX, RY, RZ, H, CNOT. Width is capped at MAX_QUBITS because
cost is 2^n. Expectations are exact unless shots are requested.

Rotation gates take their angle from exactly one of three sources: a fixed
``angle``, a trainable ``param_index``, or an encoding ``feature_index``;
the latter two are resolved at run time from the vectors handed to
:func:`run_circuit`.
"""

import math
from dataclasses import dataclass

import numpy as np

from .. import accel
from ..errors import QubitIndexError, UnsupportedGateError, WidthMismatchError

MAX_QUBITS = 12

ROTATION_KINDS = ("RX", "RY", "RZ")
GATE_KINDS = ROTATION_KINDS + ("H", "CNOT")

_INV_SQRT2 = complex(1.0 / math.sqrt(2.0))


@dataclass(frozen=True)
class Gate:
    """One gate: kind, wires, and (for rotations) an angle source."""

    kind: str
    target: int
    control: int = -1
    angle: float | None = None
    param_index: int = -1
    feature_index: int = -1

    def __post_init__(self):
        if self.kind not in GATE_KINDS:
            raise UnsupportedGateError(f"unknown gate kind {self.kind!r}")
        sources = (self.angle is not None) + (self.param_index >= 0) + (self.feature_index >= 0)
        if self.kind in ROTATION_KINDS:
            if sources != 1:
                raise UnsupportedGateError(
                    f"{self.kind} needs exactly one angle source, got {sources}"
                )
            if self.control >= 0:
                raise UnsupportedGateError("controlled rotations are not supported")
        else:
            if sources:
                raise UnsupportedGateError(f"{self.kind} takes no angle")
            if self.kind == "CNOT":
                if self.control < 0:
                    raise QubitIndexError("CNOT needs a control qubit")
                if self.control == self.target:
                    raise QubitIndexError("CNOT control equals target")
            elif self.control >= 0:
                raise UnsupportedGateError("H is not a controlled gate")
        if self.angle is not None and not math.isfinite(self.angle):
            raise ValueError(f"non-finite gate angle {self.angle!r}")


@dataclass
class StateVector:
    """Complex amplitudes of an n-qubit pure state, little-endian."""

    n_qubits: int
    amplitudes: np.ndarray

    @classmethod
    def zero(cls, n_qubits):
        """|0...0> on ``n_qubits`` qubits."""
        if not 1 <= n_qubits <= MAX_QUBITS:
            raise ValueError(f"n_qubits must be in 1..{MAX_QUBITS}, got {n_qubits}")
        amps = np.zeros(1 << n_qubits, dtype=np.complex128)
        amps[0] = 1.0
        return cls(n_qubits, amps)

    def norm(self):
        return float(np.linalg.norm(self.amplitudes))


class Circuit:
    """Ordered gate list over a fixed qubit count.

    Trainable parameter indices and encoding feature indices must each be
    dense 0..k-1; ``n_params`` / ``n_features`` validate that on access.
    """

    def __init__(self, n_qubits):
        if not 1 <= n_qubits <= MAX_QUBITS:
            raise ValueError(f"n_qubits must be in 1..{MAX_QUBITS}, got {n_qubits}")
        self.n_qubits = n_qubits
        self.gates = []

    def add(self, gate):
        if not 0 <= gate.target < self.n_qubits:
            raise QubitIndexError(f"target {gate.target} out of range for {self.n_qubits} qubits")
        if gate.kind == "CNOT" and not 0 <= gate.control < self.n_qubits:
            raise QubitIndexError(f"control {gate.control} out of range for {self.n_qubits} qubits")
        self.gates.append(gate)
        return self

    def rx(self, qubit, angle=None, *, param=-1, feature=-1):
        return self.add(Gate("RX", qubit, angle=angle, param_index=param, feature_index=feature))

    def ry(self, qubit, angle=None, *, param=-1, feature=-1):
        return self.add(Gate("RY", qubit, angle=angle, param_index=param, feature_index=feature))

    def rz(self, qubit, angle=None, *, param=-1, feature=-1):
        return self.add(Gate("RZ", qubit, angle=angle, param_index=param, feature_index=feature))

    def h(self, qubit):
        return self.add(Gate("H", qubit))

    def cnot(self, control, target):
        return self.add(Gate("CNOT", target, control=control))

    @property
    def n_params(self):
        return _dense_count({g.param_index for g in self.gates if g.param_index >= 0}, "param")

    @property
    def n_features(self):
        return _dense_count({g.feature_index for g in self.gates if g.feature_index >= 0}, "feature")

    def concat(self, other):
        """New circuit running ``self`` then ``other`` (same width required)."""
        if other.n_qubits != self.n_qubits:
            raise WidthMismatchError(
                f"cannot concat {other.n_qubits}-qubit circuit onto {self.n_qubits} qubits"
            )
        out = Circuit(self.n_qubits)
        out.gates = self.gates + other.gates
        return out

    def inverse(self):
        """Gate-wise inverse; only defined for fully bound circuits."""
        out = Circuit(self.n_qubits)
        for g in reversed(self.gates):
            if g.kind in ROTATION_KINDS:
                if g.angle is None:
                    raise UnsupportedGateError("cannot invert an unbound rotation")
                out.add(Gate(g.kind, g.target, angle=-g.angle))
            else:
                out.add(g)
        return out

    def to_payload(self):
        """Gate list as plain data for the versioned artifact format."""
        return {
            "n_qubits": self.n_qubits,
            "gates": [
                {
                    "kind": g.kind,
                    "target": g.target,
                    "control": g.control,
                    "angle": g.angle,
                    "param": g.param_index,
                    "feature": g.feature_index,
                }
                for g in self.gates
            ],
        }

    @classmethod
    def from_payload(cls, payload):
        out = cls(payload["n_qubits"])
        for g in payload["gates"]:
            out.add(
                Gate(
                    g["kind"],
                    g["target"],
                    control=g["control"],
                    angle=g["angle"],
                    param_index=g["param"],
                    feature_index=g["feature"],
                )
            )
        return out


def _dense_count(indices, what):
    if not indices:
        return 0
    k = max(indices) + 1
    if len(indices) != k:
        raise ValueError(f"{what} indices must be dense 0..k-1, got {sorted(indices)}")
    return k


def _unitary_2x2(kind, angle):
    """Unitary entries (u00, u01, u10, u11) as complex scalars."""
    if kind == "RX":
        c = complex(math.cos(angle / 2.0))
        s = -1j * math.sin(angle / 2.0)
        return c, s, s, c
    if kind == "RY":
        c = complex(math.cos(angle / 2.0))
        s = complex(math.sin(angle / 2.0))
        return c, -s, s, c
    if kind == "RZ":
        p = complex(math.cos(angle / 2.0), -math.sin(angle / 2.0))
        return p, 0j, 0j, p.conjugate()
    if kind == "H":
        return _INV_SQRT2, _INV_SQRT2, _INV_SQRT2, -_INV_SQRT2
    raise UnsupportedGateError(f"no 2x2 unitary for {kind}")


def apply_gate(state, gate, angle=None):
    """Apply one gate in place and return the state.

    ``angle`` supplies the bound value for rotation gates whose angle source
    is a parameter or feature binding; fixed-angle gates ignore it.
    """
    if not 0 <= gate.target < state.n_qubits:
        raise QubitIndexError(f"target {gate.target} out of range for {state.n_qubits} qubits")
    if gate.kind == "CNOT":
        if not 0 <= gate.control < state.n_qubits:
            raise QubitIndexError(
                f"control {gate.control} out of range for {state.n_qubits} qubits"
            )
        accel.apply_cnot(state.amplitudes, gate.control, gate.target)
        return state
    if gate.kind in ROTATION_KINDS:
        if gate.angle is not None:
            angle = gate.angle
        elif angle is None:
            raise WidthMismatchError(f"{gate.kind} gate has an unbound angle")
    else:
        angle = 0.0
    u00, u01, u10, u11 = _unitary_2x2(gate.kind, angle)
    accel.apply_1q(state.amplitudes, gate.target, u00, u01, u10, u11)
    return state


def _resolve_angle(gate, params, features):
    if gate.angle is not None:
        return gate.angle
    if gate.param_index >= 0:
        return params[gate.param_index]
    return features[gate.feature_index]


def run_circuit(circuit, params=None, features=None):
    """Run ``circuit`` from |0...0> with bindings resolved; returns the state."""
    params = _check_width(params, circuit.n_params, "params")
    features = _check_width(features, circuit.n_features, "features")
    state = StateVector.zero(circuit.n_qubits)
    for gate in circuit.gates:
        if gate.kind in ROTATION_KINDS:
            apply_gate(state, gate, float(_resolve_angle(gate, params, features)))
        else:
            apply_gate(state, gate)
    return state


def _check_width(values, expected, what):
    values = np.zeros(0) if values is None else np.asarray(values, dtype=np.float64)
    if values.shape != (expected,):
        raise WidthMismatchError(f"{what} width {values.shape} does not match circuit ({expected})")
    return values


def expval_z(state, qubit, shots=None, rng=None):
    """<Z> on ``qubit``: exact by default, sampled when ``shots`` is given."""
    if not 0 <= qubit < state.n_qubits:
        raise QubitIndexError(f"qubit {qubit} out of range for {state.n_qubits} qubits")
    probs = np.abs(state.amplitudes) ** 2
    signs = 1.0 - 2.0 * ((np.arange(probs.shape[0]) >> qubit) & 1)
    if shots is None:
        return float(np.dot(probs, signs))
    rng = np.random.default_rng() if rng is None else rng
    probs = probs / probs.sum()
    draws = rng.choice(probs.shape[0], size=shots, p=probs)
    return float(np.mean(signs[draws]))


# --- batched execution ------------------------------------------------------
# Training loops evaluate one circuit on many states at once. A C-contiguous
# (rows, 2**n) array viewed flat is, to the strided gate kernels, just a
# longer register whose row-offset bits never collide with qubit bits, so the
# single-state kernels apply unchanged.


def zero_states(n_qubits, rows):
    """(rows, 2**n_qubits) batch of |0...0> states."""
    if not 1 <= n_qubits <= MAX_QUBITS:
        raise ValueError(f"n_qubits must be in 1..{MAX_QUBITS}, got {n_qubits}")
    amps = np.zeros((rows, 1 << n_qubits), dtype=np.complex128)
    amps[:, 0] = 1.0
    return amps


def apply_gate_batch(amps, gate, angle=None):
    """Apply one shared-angle gate to every row of a contiguous batch."""
    if not amps.flags.c_contiguous:
        raise ValueError("batch must be C-contiguous for in-place gate application")
    n_qubits = int(amps.shape[1]).bit_length() - 1
    flat = amps.reshape(-1)
    if gate.kind == "CNOT":
        if not (0 <= gate.control < n_qubits and 0 <= gate.target < n_qubits):
            raise QubitIndexError("CNOT wires out of range for batch width")
        accel.apply_cnot(flat, gate.control, gate.target)
        return amps
    if not 0 <= gate.target < n_qubits:
        raise QubitIndexError(f"target {gate.target} out of range for batch width")
    if gate.kind in ROTATION_KINDS and gate.angle is not None:
        angle = gate.angle
    u00, u01, u10, u11 = _unitary_2x2(gate.kind, 0.0 if angle is None else angle)
    accel.apply_1q(flat, gate.target, u00, u01, u10, u11)
    return amps


def expval_z_batch(amps, qubit):
    """Per-row <Z> on ``qubit`` for a (rows, 2**n) batch."""
    signs = 1.0 - 2.0 * ((np.arange(amps.shape[1]) >> qubit) & 1)
    return (np.abs(amps) ** 2) @ signs
