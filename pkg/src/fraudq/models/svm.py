"""Soft-margin kernel SVM: SMO dual solver over a precomputed kernel matrix
plus a predictor that recomputes kernel rows against stored support vectors.

The solver is shared by the linear baseline configuration and the fidelity
kernel model; it only ever sees a kernel matrix.
"""

from dataclasses import dataclass

import numpy as np

from .. import accel
from ..errors import DimensionMismatchError, NonFiniteError, NotSymmetricError, SingleClassError
from .base import TrainedModel, fit_platt_scale, register, sigmoid


@dataclass
class SvmSolution:
    alpha: np.ndarray
    bias: float
    iterations: int
    converged: bool
    decision_values: np.ndarray  # training-row decisions including bias


def smo_solve(K, y, C, tol=1e-3, max_iter=None):
    """Solve the dual for labels in {-1,+1}; returns an SvmSolution.

    Bias comes from averaging y_i - f0(x_i) over free support vectors
    (0 < alpha < C); if none are free it falls back to the midpoint of the
    final violating-pair bounds.
    """
    K = np.asarray(K, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if K.ndim != 2 or K.shape[0] != K.shape[1]:
        raise DimensionMismatchError(f"kernel matrix must be square, got {K.shape}")
    if K.shape[0] != y.shape[0]:
        raise DimensionMismatchError(f"kernel size {K.shape[0]} does not match {y.shape[0]} labels")
    if not np.all(np.isfinite(K)):
        raise NonFiniteError("kernel matrix contains non-finite entries")
    if np.max(np.abs(K - K.T)) > 1e-8:
        raise NotSymmetricError("kernel matrix is not symmetric")
    if not np.all(np.abs(y) == 1.0):
        raise ValueError("labels must be -1 or +1")
    if np.all(y == y[0]):
        raise SingleClassError("need both classes to define the margin")
    if max_iter is None:
        max_iter = max(100_000, 100 * y.shape[0])

    alpha, grad, m, big_m, iterations, converged = accel.smo_precomputed(
        np.ascontiguousarray(K), y, float(C), float(tol), int(max_iter)
    )
    # grad_i = y_i * f0(x_i) - 1, so the no-bias decision is y * (grad + 1)
    f0 = y * (grad + 1.0)
    eps = 1e-8 * max(float(C), 1.0)
    free = (alpha > eps) & (alpha < C - eps)
    if free.any():
        bias = float(np.mean((y - f0)[free]))
    else:
        bias = float((m + big_m) / 2.0)
    return SvmSolution(
        alpha=alpha,
        bias=bias,
        iterations=iterations,
        converged=converged,
        decision_values=f0 + bias,
    )


def kkt_max_violation(K, y, alpha, bias, C):
    """Largest KKT violation of a dual solution; 0 means exactly optimal."""
    f = K @ (alpha * y) + bias
    margins = y * f
    violation = 0.0
    eps = 1e-8 * max(float(C), 1.0)
    for i in range(y.shape[0]):
        if alpha[i] <= eps:
            violation = max(violation, 1.0 - margins[i])
        elif alpha[i] >= C - eps:
            violation = max(violation, margins[i] - 1.0)
        else:
            violation = max(violation, abs(margins[i] - 1.0))
    return float(violation)


def _kernel_fn(name, repetitions):
    if name == "linear":
        return lambda X, Z: np.atleast_2d(X) @ np.atleast_2d(Z).T
    if name == "fidelity":
        from ..quantum.kernel import kernel_cross

        return lambda X, Z: kernel_cross(X, Z, repetitions)
    raise ValueError(f"unknown kernel {name!r}")


@register("svm")
class KernelSvmModel(TrainedModel):
    """SVM over a named kernel; probability via a one-parameter sigmoid
    calibrated on training decision values."""

    def __init__(self, support_vectors, dual_coef, bias, C, kernel_name, repetitions, platt_a):
        self.support_vectors = np.atleast_2d(np.asarray(support_vectors, dtype=np.float64))
        self.dual_coef = np.asarray(dual_coef, dtype=np.float64)
        self.bias = float(bias)
        self.C = float(C)
        self.kernel_name = kernel_name
        self.repetitions = repetitions
        self.platt_a = float(platt_a)

    @classmethod
    def fit(cls, X, y, C=1.0, kernel="linear", tol=1e-3, repetitions=1, max_iter=None):
        """Labels in {0,1}; kernel inputs must already be in kernel space
        (angles in [0, pi] for the fidelity kernel)."""
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        y01 = np.asarray(y)
        if np.all(y01 == y01.flat[0]):
            raise SingleClassError("need both classes to train an SVM")
        y_pm = np.where(y01 == 1, 1.0, -1.0)
        kernel_matrix = _kernel_fn(kernel, repetitions)(X, X)
        solution = smo_solve(kernel_matrix, y_pm, C, tol=tol, max_iter=max_iter)
        keep = solution.alpha > 1e-9
        platt_a = fit_platt_scale(solution.decision_values, y01)
        return cls(
            support_vectors=X[keep],
            dual_coef=solution.alpha[keep] * y_pm[keep],
            bias=solution.bias,
            C=C,
            kernel_name=kernel,
            repetitions=repetitions,
            platt_a=platt_a,
        )

    def decision_scores(self, X):
        X = self.check_width(X, self.support_vectors.shape[1])
        cross = _kernel_fn(self.kernel_name, self.repetitions)(X, self.support_vectors)
        return cross @ self.dual_coef + self.bias

    def predict_proba(self, X):
        return sigmoid(self.platt_a * self.decision_scores(X))

    def to_payload(self):
        return {
            "support_vectors": self.support_vectors.tolist(),
            "dual_coef": self.dual_coef.tolist(),
            "bias": self.bias,
            "C": self.C,
            "kernel": self.kernel_name,
            "repetitions": self.repetitions,
            "platt_a": self.platt_a,
        }

    @classmethod
    def from_payload(cls, payload):
        return cls(
            payload["support_vectors"],
            payload["dual_coef"],
            payload["bias"],
            payload["C"],
            payload["kernel"],
            payload["repetitions"],
            payload["platt_a"],
        )
