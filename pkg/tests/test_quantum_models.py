"""Variational and kernel quantum classifiers: batched execution versus the
single-row simulator, closed forms, shift-rule gradients against finite
differences, training behaviour, and artifact round trips."""

import numpy as np
import pytest

from fraudq.errors import (
    DimensionMismatchError,
    SingleClassError,
    WidthMismatchError,
)
from fraudq.models import (
    HqnnModel,
    KernelSvmModel,
    QsvmModel,
    VqcModel,
    load_model,
    save_model,
    sigmoid,
)
from fraudq.quantum.circuits import ansatz, feature_map
from fraudq.quantum.simulator import run_circuit
from fraudq.quantum.variational import encode_batch, fragment_pass, rotate_rows_y

from .oracles import central_fd


def blobs(rng, n=60, d=3, gap=2.5):
    X = rng.normal(size=(n, d))
    y = (np.arange(n) % 2).astype(int)
    X[y == 1, 0] += gap
    return X, y


def circles(rng, n=100):
    theta = rng.uniform(0.0, 2.0 * np.pi, n)
    y = (np.arange(n) % 2).astype(int)
    radius = np.where(y == 1, 0.5, 1.5) + rng.normal(0.0, 0.05, n)
    X = np.stack([radius * np.cos(theta), radius * np.sin(theta)], axis=1)
    return X, y


class TestBatchedEncoding:
    @pytest.mark.parametrize("n_qubits,repetitions", [(1, 1), (2, 1), (4, 1), (3, 2)])
    def test_matches_single_row_simulator(self, n_qubits, repetitions):
        rng = np.random.default_rng(20)
        angles = rng.uniform(0.0, np.pi, size=(7, n_qubits))
        batch = encode_batch(angles, repetitions)
        fmap = feature_map(n_qubits, repetitions)
        for r in range(angles.shape[0]):
            single = run_circuit(fmap, features=angles[r]).amplitudes
            assert np.max(np.abs(batch[r] - single)) < 1e-12

    def test_wrong_angle_count_rejected(self):
        amps = encode_batch(np.zeros((3, 2)))
        with pytest.raises(WidthMismatchError):
            rotate_rows_y(amps, 0, np.zeros(2))

    def test_fragment_pass_matches_bound_circuit(self):
        rng = np.random.default_rng(21)
        fragment = ansatz(3, 2)
        params = rng.uniform(-1.0, 1.0, fragment.n_params)
        angles = rng.uniform(0.0, np.pi, size=(5, 3))
        rows = encode_batch(angles)
        fragment_pass(fragment, params, rows)
        full = feature_map(3).concat(fragment)
        for r in range(5):
            single = run_circuit(full, params=params, features=angles[r]).amplitudes
            assert np.max(np.abs(rows[r] - single)) < 1e-12

    def test_unbound_feature_gate_rejected(self):
        batch = encode_batch(np.zeros((2, 2)))
        with pytest.raises(WidthMismatchError):
            fragment_pass(feature_map(2), np.zeros(0), batch)


class TestVqc:
    def test_identity_circuit_probability_zero(self):
        model = VqcModel(np.zeros(8), n_qubits=4, layers=1)
        p = model.probabilities_from_angles(np.zeros((1, 4)))
        assert p[0] == 0.0

    def test_single_point_loss_decreases_monotonically(self):
        model = VqcModel.fit_on_angles(
            np.array([[np.pi / 3]]), np.array([1.0]),
            layers=1, epochs=10, batch_size=1, learning_rate=0.05, seed=0,
        )
        losses = np.array(model.loss_history)
        assert losses.size == 10
        assert np.all(np.diff(losses) < 0)

    def test_layer_counts_give_expected_parameter_sizes(self):
        assert VqcModel(np.zeros(8), 4, 1).params.size == 8
        assert VqcModel(np.zeros(16), 4, 2).params.size == 16
        with pytest.raises(WidthMismatchError):
            VqcModel(np.zeros(9), 4, 1)

    def test_fit_final_epoch_loss_at_most_first(self):
        rng = np.random.default_rng(22)
        X, y = blobs(rng, n=48, d=3)
        model = VqcModel.fit(X, y, n_qubits=2, layers=1, epochs=4, batch_size=16, seed=1)
        assert model.loss_history[-1] <= model.loss_history[0]

    def test_fit_deterministic(self):
        rng = np.random.default_rng(23)
        X, y = blobs(rng, n=32, d=3)
        a = VqcModel.fit(X, y, n_qubits=2, epochs=2, seed=5).predict_proba(X)
        b = VqcModel.fit(X, y, n_qubits=2, epochs=2, seed=5).predict_proba(X)
        assert np.array_equal(a, b)

    def test_single_class_rejected(self):
        with pytest.raises(SingleClassError):
            VqcModel.fit(np.random.default_rng(0).normal(size=(10, 3)), np.ones(10))

    def test_probabilities_bounded(self):
        rng = np.random.default_rng(24)
        X, y = blobs(rng, n=24, d=4)
        model = VqcModel.fit(X, y, n_qubits=4, layers=2, epochs=1, seed=2)
        p = model.predict_proba(rng.normal(size=(50, 4)) * 5)
        assert np.all((p >= 0) & (p <= 1))

    def test_artifact_round_trip(self, tmp_path):
        rng = np.random.default_rng(25)
        X, y = blobs(rng, n=24, d=3)
        model = VqcModel.fit(X, y, n_qubits=2, epochs=1, seed=3)
        save_model(model, tmp_path / "vqc.json")
        again = load_model(tmp_path / "vqc.json")
        probes = rng.normal(size=(10, 3))
        assert np.array_equal(model.predict_proba(probes), again.predict_proba(probes))
        assert again.engine == "quantum"


class TestHqnn:
    def toy_model(self, seed=30, n_features=3, n_qubits=2, layers=1, encoder_layers=1):
        rng = np.random.default_rng(seed)
        shapes_total = (sum(a * b + b for a, b in
                            [(n_features, n_qubits)] + [(n_qubits, n_qubits)] * (encoder_layers - 1))
                        + n_qubits + 1 + 2 * n_qubits * layers)
        params = rng.uniform(-0.5, 0.5, size=shapes_total)
        return HqnnModel(params, n_features, n_qubits, layers, encoder_layers=encoder_layers)

    def test_zero_parameters_give_constant_path(self):
        model = HqnnModel(np.zeros(3 * 2 + 2 + 2 + 1 + 4), 3, 2, 1)
        x = np.array([[0.4, -1.2, 3.0]])
        p, _, angles, _ = model._forward(model._standardize(x), model.params)
        assert np.allclose(angles, np.pi / 2, atol=0)
        assert p[0] == sigmoid(np.array([0.0]))[0] == 0.5

        biased = model.params.copy()
        biased[3 * 2 + 2 + 2] = 0.3  # head bias slot
        p_biased = model._forward(model._standardize(x), biased)[0]
        assert abs(p_biased[0] - sigmoid(np.array([0.3]))[0]) < 1e-15

    def test_output_in_open_interval(self):
        model = self.toy_model()
        rng = np.random.default_rng(31)
        p = model.predict_proba(rng.normal(size=(40, 3)) * 100)
        assert np.all((p > 0) & (p < 1))

    def test_end_to_end_gradient_matches_finite_differences(self):
        model = self.toy_model(seed=32)
        rng = np.random.default_rng(33)
        X = rng.normal(size=(6, 3))
        y = np.array([1.0, 0.0, 1.0, 1.0, 0.0, 0.0])
        analytic = model.gradient(X, y)
        numeric = central_fd(lambda p: model.loss(X, y, p), model.params.copy(), h=1e-4)
        assert np.max(np.abs(analytic - numeric)) < 1e-4

    def test_gradient_matches_fd_with_deeper_encoder(self):
        model = self.toy_model(seed=34, encoder_layers=2, layers=2)
        rng = np.random.default_rng(35)
        X = rng.normal(size=(5, 3))
        y = np.array([1.0, 0.0, 0.0, 1.0, 0.0])
        analytic = model.gradient(X, y)
        numeric = central_fd(lambda p: model.loss(X, y, p), model.params.copy(), h=1e-4)
        assert np.max(np.abs(analytic - numeric)) < 1e-4

    def test_fit_learns_easy_toy(self):
        rng = np.random.default_rng(36)
        X, y = blobs(rng, n=40, d=3)
        model = HqnnModel.fit(X, y, n_qubits=2, layers=1, epochs=5, batch_size=16,
                              learning_rate=0.05, seed=4)
        assert model.loss_history[-1] <= model.loss_history[0]

    def test_fit_deterministic(self):
        rng = np.random.default_rng(37)
        X, y = blobs(rng, n=24, d=3)
        a = HqnnModel.fit(X, y, n_qubits=2, epochs=2, seed=6).predict_proba(X)
        b = HqnnModel.fit(X, y, n_qubits=2, epochs=2, seed=6).predict_proba(X)
        assert np.array_equal(a, b)

    def test_single_class_rejected(self):
        with pytest.raises(SingleClassError):
            HqnnModel.fit(np.zeros((5, 2)), np.zeros(5))

    def test_width_mismatch_is_dimension_mismatch(self):
        model = self.toy_model()
        with pytest.raises(DimensionMismatchError):
            model.predict_proba(np.zeros((2, 7)))
        assert issubclass(WidthMismatchError, DimensionMismatchError)

    def test_artifact_round_trip(self, tmp_path):
        rng = np.random.default_rng(38)
        X, y = blobs(rng, n=24, d=3)
        model = HqnnModel.fit(X, y, n_qubits=2, epochs=1, seed=7, encoder_layers=2)
        save_model(model, tmp_path / "hqnn.json")
        again = load_model(tmp_path / "hqnn.json")
        probes = rng.normal(size=(10, 3))
        assert np.array_equal(model.predict_proba(probes), again.predict_proba(probes))
        assert again.engine == "quantum"


class TestQsvm:
    def test_trains_at_two_and_four_qubits(self):
        rng = np.random.default_rng(40)
        X = rng.normal(size=(200, 6))
        y = (np.arange(200) % 2).astype(int)
        # class signal spread over correlated columns so the principal
        # components the preprocessor keeps actually carry it
        X[y == 1, :3] += 2.5
        for q in (2, 4):
            model = QsvmModel.fit(X, y, n_qubits=q, C=1.0)
            p = model.predict_proba(X)
            assert np.all((p >= 0) & (p <= 1))
            _, labels = model.predict(X)
            assert np.mean(labels == y) > 0.9, q

    def test_deterministic(self):
        rng = np.random.default_rng(41)
        X, y = blobs(rng, n=80, d=5)
        a = QsvmModel.fit(X, y, n_qubits=2).predict_proba(X)
        b = QsvmModel.fit(X, y, n_qubits=2).predict_proba(X)
        assert np.array_equal(a, b)

    def test_beats_linear_svm_on_circles(self):
        rng = np.random.default_rng(42)
        X, y = circles(rng, n=100)
        quantum = QsvmModel.fit(X, y, n_qubits=2, C=10.0)
        linear = KernelSvmModel.fit(X, y, C=10.0, kernel="linear")
        acc_q = np.mean(quantum.predict(X)[1] == y)
        acc_l = np.mean(linear.predict(X)[1] == y)
        assert acc_q > acc_l

    def test_single_class_rejected(self):
        with pytest.raises(SingleClassError):
            QsvmModel.fit(np.random.default_rng(0).normal(size=(8, 3)), np.zeros(8))

    def test_artifact_round_trip(self, tmp_path):
        rng = np.random.default_rng(43)
        X, y = blobs(rng, n=60, d=4)
        model = QsvmModel.fit(X, y, n_qubits=2)
        save_model(model, tmp_path / "qsvm.json")
        again = load_model(tmp_path / "qsvm.json")
        probes = rng.normal(size=(12, 4))
        assert np.array_equal(model.predict_proba(probes), again.predict_proba(probes))
        assert again.engine == "quantum"
