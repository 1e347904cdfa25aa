"""Pure-numpy implementations of the hot kernels.

Reference path for the numba twins in ``numba_kernels``: both modules expose
the same functions with the same contracts, and the test suite checks them
against each other. Selection happens in ``fraudq.accel``.
"""

import numpy as np


def apply_1q(amps, qubit, u00, u01, u10, u11):
    """Apply a 2x2 unitary to ``qubit`` of a little-endian state, in place.

    ``amps`` has length 2**n; qubit 0 is the least significant index bit.
    """
    block = 1 << qubit
    view = amps.reshape(-1, 2, block)
    a0 = view[:, 0, :]
    a1 = view[:, 1, :]
    new0 = u00 * a0 + u01 * a1
    new1 = u10 * a0 + u11 * a1
    view[:, 0, :] = new0
    view[:, 1, :] = new1


def apply_cnot(amps, control, target):
    """Flip ``target`` amplitudes where the ``control`` bit is set, in place."""
    n = amps.shape[0]
    idx = np.arange(n)
    src = (idx >> control) & 1 == 1
    amps[src] = amps[idx[src] ^ (1 << target)]


def best_split_gini(values, pos, min_leaf):
    """Best Gini split of one feature column.

    ``values`` ascending, ``pos`` the aligned 0/1 labels as floats. Candidate
    thresholds are midpoints of consecutive distinct values. Returns
    ``(gain, threshold, valid)`` where gain is the impurity decrease weighted
    by node size and ties keep the lowest threshold.
    """
    n = values.shape[0]
    if n < 2 * min_leaf:
        return 0.0, 0.0, False
    total_pos = float(np.sum(pos))
    total = float(n)
    parent = 2.0 * (total_pos / total) * (1.0 - total_pos / total)

    left_n = np.arange(1, n, dtype=np.float64)
    left_pos = np.cumsum(pos)[:-1]
    right_n = total - left_n
    right_pos = total_pos - left_pos

    pl = left_pos / left_n
    pr = right_pos / right_n
    weighted = (left_n * 2.0 * pl * (1.0 - pl) + right_n * 2.0 * pr * (1.0 - pr)) / total
    gain = parent - weighted

    ok = (values[:-1] != values[1:]) & (left_n >= min_leaf) & (right_n >= min_leaf)
    if not np.any(ok):
        return 0.0, 0.0, False
    gain = np.where(ok, gain, -np.inf)
    best = int(np.argmax(gain))
    return float(gain[best]), float((values[best] + values[best + 1]) / 2.0), True


def best_split_newton(values, grad, hess, lam, min_leaf):
    """Best second-order (Newton) split of one feature column.

    Gain is ``0.5 * (GL^2/(HL+lam) + GR^2/(HR+lam) - G^2/(H+lam))`` with
    prefix sums of ``grad`` and ``hess``; same candidate and tie rules as
    :func:`best_split_gini`.
    """
    n = values.shape[0]
    if n < 2 * min_leaf:
        return 0.0, 0.0, False
    g_total = float(np.sum(grad))
    h_total = float(np.sum(hess))
    parent = g_total * g_total / (h_total + lam)

    gl = np.cumsum(grad)[:-1]
    hl = np.cumsum(hess)[:-1]
    gr = g_total - gl
    hr = h_total - hl
    gain = 0.5 * (gl * gl / (hl + lam) + gr * gr / (hr + lam) - parent)

    left_n = np.arange(1, n)
    ok = (values[:-1] != values[1:]) & (left_n >= min_leaf) & (n - left_n >= min_leaf)
    if not np.any(ok):
        return 0.0, 0.0, False
    gain = np.where(ok, gain, -np.inf)
    best = int(np.argmax(gain))
    return float(gain[best]), float((values[best] + values[best + 1]) / 2.0), True


def smo_precomputed(K, y, C, tol, max_iter):
    """Solve the soft-margin SVM dual over a precomputed kernel matrix.

    Minimizes 0.5 a'Qa - 1'a with Q = (y y') * K subject to 0 <= a <= C and
    y'a = 0, by repeatedly optimizing the maximal violating pair. Returns
    ``(alpha, grad, m, M, iterations, converged)``; ``grad`` is the dual
    gradient y_i * f0(x_i) - 1 used by the caller to place the bias, and
    convergence means m - M <= tol.
    """
    n = y.shape[0]
    alpha = np.zeros(n)
    grad = -np.ones(n)
    neg_inf = -np.inf

    m = 0.0
    big_m = 0.0
    it = 0
    for it in range(1, max_iter + 1):
        v = -y * grad
        up = ((y > 0) & (alpha < C)) | ((y < 0) & (alpha > 0))
        low = ((y > 0) & (alpha > 0)) | ((y < 0) & (alpha < C))
        if not up.any() or not low.any():
            return alpha, grad, 0.0, 0.0, it - 1, True
        vi = np.where(up, v, neg_inf)
        vj = np.where(low, v, np.inf)
        i = int(np.argmax(vi))
        j = int(np.argmin(vj))
        m = float(vi[i])
        big_m = float(vj[j])
        if m - big_m <= tol:
            return alpha, grad, m, big_m, it - 1, True

        quad = K[i, i] + K[j, j] - 2.0 * K[i, j]
        if quad <= 1e-12:
            quad = 1e-12
        t = (m - big_m) / quad
        # box limits along the feasible direction (+y_i on i, -y_j on j)
        bound_i = C - alpha[i] if y[i] > 0 else alpha[i]
        bound_j = alpha[j] if y[j] > 0 else C - alpha[j]
        t = min(t, bound_i, bound_j)

        new_i = alpha[i] + y[i] * t
        new_j = alpha[j] - y[j] * t
        if new_i < 0.0:
            new_i = 0.0
        elif new_i > C:
            new_i = C
        if new_j < 0.0:
            new_j = 0.0
        elif new_j > C:
            new_j = C
        alpha[i] = new_i
        alpha[j] = new_j

        grad += y * t * (K[i] - K[j])

    return alpha, grad, m, big_m, it, False
