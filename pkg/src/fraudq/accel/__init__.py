"""Backend selection for the hot kernels.

``FRAUDQ_BACKEND`` picks the implementation:

* ``auto`` (default): numba if it imports, else numpy
* ``numba``: require numba, fail loudly if missing
* ``numpy``: pure numpy, no compilation

Both backends expose the same five functions with identical semantics; see
``numpy_kernels`` for the contracts.
"""

import os

from . import numpy_kernels

_choice = os.environ.get("FRAUDQ_BACKEND", "auto").strip().lower()

if _choice not in ("auto", "numba", "numpy"):
    raise ValueError(f"FRAUDQ_BACKEND must be auto, numba or numpy, got {_choice!r}")

if _choice == "numpy":
    _impl = numpy_kernels
    BACKEND = "numpy"
else:
    try:
        from . import numba_kernels as _impl

        BACKEND = "numba"
    except ImportError:
        if _choice == "numba":
            raise
        _impl = numpy_kernels
        BACKEND = "numpy"

apply_1q = _impl.apply_1q
apply_cnot = _impl.apply_cnot
best_split_gini = _impl.best_split_gini
best_split_newton = _impl.best_split_newton
smo_precomputed = _impl.smo_precomputed

__all__ = [
    "BACKEND",
    "apply_1q",
    "apply_cnot",
    "best_split_gini",
    "best_split_newton",
    "smo_precomputed",
]
