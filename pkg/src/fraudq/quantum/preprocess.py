"""Feature-to-qubit reduction: standardize, project onto principal
components, then min-max scale each projected dimension to [0, pi] so the
outputs are valid rotation angles."""

import numpy as np

from ..errors import DimensionMismatchError

OUT_MAX = np.pi


class QuantumPreprocessor:
    """Maps d raw features to q angles in [0, pi].

    The projection is a plain SVD of the standardized training matrix with a
    deterministic sign convention (largest-magnitude loading positive), so
    fitting is seedless and reproducible. Transform clips to [0, pi]: training
    rows land inside by construction, serving-time outliers get pinned to the
    ends rather than wrapping around the rotation.
    """

    def __init__(self, n_dims):
        if n_dims < 1:
            raise ValueError(f"n_dims must be >= 1, got {n_dims}")
        self.n_dims = n_dims
        self.mean = None
        self.std = None
        self.components = None
        self.proj_min = None
        self.proj_range = None

    def fit(self, X):
        X = np.asarray(X, dtype=np.float64)
        if X.ndim != 2 or X.shape[0] < 2:
            raise DimensionMismatchError(f"need a 2-D matrix with >= 2 rows, got {X.shape}")
        if X.shape[1] < self.n_dims:
            raise DimensionMismatchError(
                f"cannot project {X.shape[1]} features onto {self.n_dims} dimensions"
            )
        self.mean = X.mean(axis=0)
        self.std = X.std(axis=0, ddof=0)
        self.std = np.where(self.std > 0, self.std, 1.0)
        standardized = (X - self.mean) / self.std
        _, _, vt = np.linalg.svd(standardized, full_matrices=False)
        components = vt[: self.n_dims].T
        # sign convention: per component, make the largest-|loading| entry positive
        anchors = np.argmax(np.abs(components), axis=0)
        signs = np.sign(components[anchors, np.arange(components.shape[1])])
        signs = np.where(signs == 0, 1.0, signs)
        self.components = components * signs
        projected = standardized @ self.components
        self.proj_min = projected.min(axis=0)
        self.proj_range = projected.max(axis=0) - self.proj_min
        self.proj_range = np.where(self.proj_range > 0, self.proj_range, 1.0)
        return self

    def transform(self, X):
        if self.components is None:
            raise ValueError("preprocessor is not fitted")
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        if X.shape[1] != self.mean.shape[0]:
            raise DimensionMismatchError(
                f"expected {self.mean.shape[0]} features, got {X.shape[1]}"
            )
        projected = ((X - self.mean) / self.std) @ self.components
        scaled = (projected - self.proj_min) / self.proj_range * OUT_MAX
        return np.clip(scaled, 0.0, OUT_MAX)

    def fit_transform(self, X):
        return self.fit(X).transform(X)

    def to_payload(self):
        return {
            "n_dims": self.n_dims,
            "mean": self.mean.tolist(),
            "std": self.std.tolist(),
            "components": self.components.tolist(),
            "proj_min": self.proj_min.tolist(),
            "proj_range": self.proj_range.tolist(),
        }

    @classmethod
    def from_payload(cls, payload):
        pre = cls(payload["n_dims"])
        pre.mean = np.asarray(payload["mean"])
        pre.std = np.asarray(payload["std"])
        pre.components = np.asarray(payload["components"])
        pre.proj_min = np.asarray(payload["proj_min"])
        pre.proj_range = np.asarray(payload["proj_range"])
        return pre
