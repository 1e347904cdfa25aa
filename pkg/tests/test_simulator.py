"""Simulator checks against dense-matrix oracles and closed forms."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fraudq.errors import QubitIndexError, UnsupportedGateError, WidthMismatchError
from fraudq.quantum import Circuit, Gate, StateVector, apply_gate, expval_z, run_circuit
from fraudq.quantum.simulator import apply_gate_batch, expval_z_batch, zero_states

from .oracles import circuit_unitary

GATE_POOL = ("RX", "RY", "RZ", "H", "CNOT")


def random_circuit(rng, n_qubits, n_gates, bind=True):
    c = Circuit(n_qubits)
    for _ in range(n_gates):
        kind = GATE_POOL[rng.integers(0, len(GATE_POOL))]
        if kind == "CNOT" and n_qubits > 1:
            a, b = rng.choice(n_qubits, size=2, replace=False)
            c.cnot(int(a), int(b))
        elif kind == "H":
            c.h(int(rng.integers(0, n_qubits)))
        elif kind != "CNOT":
            angle = float(rng.uniform(-2 * math.pi, 2 * math.pi)) if bind else None
            c.add(Gate(kind, int(rng.integers(0, n_qubits)), angle=angle))
    return c


class TestSingleGates:
    def test_h_on_zero(self):
        state = apply_gate(StateVector.zero(1), Gate("H", 0))
        r = 1 / math.sqrt(2)
        assert np.allclose(state.amplitudes, [r, r], atol=1e-15)

    def test_cnot_moves_index_1_to_3(self):
        # little-endian: qubit 0 set means basis index 1
        state = StateVector.zero(2)
        state.amplitudes[0] = 0.0
        state.amplitudes[1] = 1.0
        apply_gate(state, Gate("CNOT", 1, control=0))
        assert state.amplitudes[3] == 1.0
        assert np.count_nonzero(state.amplitudes) == 1

    def test_ry_pi_flips(self):
        state = apply_gate(StateVector.zero(1), Gate("RY", 0, angle=math.pi))
        assert abs(state.amplitudes[0]) < 1e-12
        assert abs(state.amplitudes[1] - 1.0) < 1e-12

    def test_target_out_of_range(self):
        with pytest.raises(QubitIndexError):
            apply_gate(StateVector.zero(2), Gate("RY", 5, angle=0.1))


class TestRunCircuit:
    def test_empty_circuit_is_identity(self):
        state = run_circuit(Circuit(3))
        expected = np.zeros(8)
        expected[0] = 1.0
        assert np.array_equal(state.amplitudes, expected)

    def test_inverse_returns_to_zero(self):
        rng = np.random.default_rng(11)
        for _ in range(20):
            c = random_circuit(rng, 3, 30)
            state = run_circuit(c.concat(c.inverse()))
            expected = np.zeros(8)
            expected[0] = 1.0
            assert np.max(np.abs(state.amplitudes - expected)) < 1e-10

    def test_norm_one_after_every_gate(self):
        rng = np.random.default_rng(5)
        for n_qubits in (1, 2, 3, 4):
            state = StateVector.zero(n_qubits)
            for gate in random_circuit(rng, n_qubits, 100).gates:
                apply_gate(state, gate)
                assert abs(state.norm() - 1.0) < 1e-12

    def test_matches_kronecker_oracle(self):
        rng = np.random.default_rng(23)
        for _ in range(25):
            c = random_circuit(rng, 3, 25)
            state = run_circuit(c)
            expected = circuit_unitary(c)[:, 0]
            assert np.max(np.abs(state.amplitudes - expected)) < 1e-10

    def test_binding_resolution(self):
        c = Circuit(1)
        c.ry(0, param=0)
        c.rz(0, feature=0)
        bound = Circuit(1)
        bound.ry(0, 0.7)
        bound.rz(0, -1.1)
        got = run_circuit(c, params=[0.7], features=[-1.1])
        want = run_circuit(bound)
        assert np.allclose(got.amplitudes, want.amplitudes, atol=1e-15)

    def test_width_mismatch(self):
        c = Circuit(2)
        c.ry(0, param=0)
        with pytest.raises(WidthMismatchError):
            run_circuit(c, params=[0.1, 0.2])
        with pytest.raises(WidthMismatchError):
            run_circuit(c)


class TestValidation:
    def test_unknown_kind(self):
        with pytest.raises(UnsupportedGateError):
            Gate("TOFFOLI", 0)

    def test_rotation_needs_exactly_one_angle_source(self):
        with pytest.raises(UnsupportedGateError):
            Gate("RY", 0)
        with pytest.raises(UnsupportedGateError):
            Gate("RY", 0, angle=0.1, param_index=0)

    def test_cnot_control_equals_target(self):
        with pytest.raises(QubitIndexError):
            Gate("CNOT", 1, control=1)

    def test_width_cap(self):
        with pytest.raises(ValueError):
            Circuit(13)
        with pytest.raises(ValueError):
            StateVector.zero(0)

    def test_non_dense_param_indices(self):
        c = Circuit(1)
        c.ry(0, param=1)
        with pytest.raises(ValueError):
            _ = c.n_params

    def test_non_finite_angle(self):
        with pytest.raises(ValueError):
            Gate("RX", 0, angle=float("nan"))


class TestExpvalZ:
    def test_zero_state(self):
        assert expval_z(StateVector.zero(3), 1) == 1.0

    def test_ry_closed_form(self):
        for theta in np.linspace(-2 * math.pi, 2 * math.pi, 41):
            state = apply_gate(StateVector.zero(1), Gate("RY", 0, angle=float(theta)))
            assert abs(expval_z(state, 0) - math.cos(theta)) < 1e-12

    def test_uniform_superposition_is_zero_everywhere(self):
        c = Circuit(3)
        for q in range(3):
            c.h(q)
        state = run_circuit(c)
        for q in range(3):
            assert abs(expval_z(state, q)) < 1e-12

    def test_shot_sampling_tracks_exact(self):
        state = apply_gate(StateVector.zero(1), Gate("RY", 0, angle=1.0))
        exact = expval_z(state, 0)
        sampled = expval_z(state, 0, shots=20_000, rng=np.random.default_rng(3))
        assert abs(sampled - exact) < 0.03

    def test_qubit_out_of_range(self):
        with pytest.raises(QubitIndexError):
            expval_z(StateVector.zero(2), 2)


class TestBatched:
    def test_batch_matches_row_by_row(self):
        rng = np.random.default_rng(17)
        c = random_circuit(rng, 3, 20)
        rows = 7
        batch = zero_states(3, rows)
        for gate in c.gates:
            apply_gate_batch(batch, gate)
        single = run_circuit(c)
        for r in range(rows):
            assert np.max(np.abs(batch[r] - single.amplitudes)) < 1e-12
        z = expval_z_batch(batch, 2)
        assert np.allclose(z, expval_z(single, 2), atol=1e-12)

    def test_non_contiguous_rejected(self):
        batch = zero_states(2, 4)[::2]
        with pytest.raises(ValueError):
            apply_gate_batch(batch, Gate("H", 0))


@settings(max_examples=30, deadline=None)
@given(st.integers(min_value=0, max_value=2**32 - 1), st.integers(min_value=1, max_value=4))
def test_norm_preservation_property(seed, n_qubits):
    rng = np.random.default_rng(seed)
    state = run_circuit(random_circuit(rng, n_qubits, 40))
    assert abs(state.norm() - 1.0) < 1e-12
