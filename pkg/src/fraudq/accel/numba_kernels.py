"""Numba twins of the kernels in ``numpy_kernels``.

Same signatures, same tie rules (first index wins on equal gain, so both
backends pick identical splits and pairs). Keep these loop-based: the point
is to avoid the temporaries the vectorized path allocates.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def apply_1q(amps, qubit, u00, u01, u10, u11):
    block = 1 << qubit
    stride = block << 1
    n = amps.shape[0]
    for base in range(0, n, stride):
        for off in range(block):
            i0 = base + off
            i1 = i0 + block
            a0 = amps[i0]
            a1 = amps[i1]
            amps[i0] = u00 * a0 + u01 * a1
            amps[i1] = u10 * a0 + u11 * a1


@njit(cache=True)
def apply_cnot(amps, control, target):
    n = amps.shape[0]
    cbit = 1 << control
    tbit = 1 << target
    for i in range(n):
        # visit each swapped pair once, from the target-0 side
        if (i & cbit) and not (i & tbit):
            j = i | tbit
            amps[i], amps[j] = amps[j], amps[i]


@njit(cache=True)
def best_split_gini(values, pos, min_leaf):
    n = values.shape[0]
    if n < 2 * min_leaf:
        return 0.0, 0.0, False
    total = float(n)
    total_pos = 0.0
    for i in range(n):
        total_pos += pos[i]
    p = total_pos / total
    parent = 2.0 * p * (1.0 - p)

    best_gain = -np.inf
    best_thr = 0.0
    found = False
    left_pos = 0.0
    for i in range(n - 1):
        left_pos += pos[i]
        left_n = float(i + 1)
        right_n = total - left_n
        if values[i] == values[i + 1] or left_n < min_leaf or right_n < min_leaf:
            continue
        pl = left_pos / left_n
        pr = (total_pos - left_pos) / right_n
        weighted = (left_n * 2.0 * pl * (1.0 - pl) + right_n * 2.0 * pr * (1.0 - pr)) / total
        gain = parent - weighted
        if gain > best_gain:
            best_gain = gain
            best_thr = (values[i] + values[i + 1]) / 2.0
            found = True
    if not found:
        return 0.0, 0.0, False
    return best_gain, best_thr, True


@njit(cache=True)
def best_split_newton(values, grad, hess, lam, min_leaf):
    n = values.shape[0]
    if n < 2 * min_leaf:
        return 0.0, 0.0, False
    g_total = 0.0
    h_total = 0.0
    for i in range(n):
        g_total += grad[i]
        h_total += hess[i]
    parent = g_total * g_total / (h_total + lam)

    best_gain = -np.inf
    best_thr = 0.0
    found = False
    gl = 0.0
    hl = 0.0
    for i in range(n - 1):
        gl += grad[i]
        hl += hess[i]
        left_n = i + 1
        right_n = n - left_n
        if values[i] == values[i + 1] or left_n < min_leaf or right_n < min_leaf:
            continue
        gr = g_total - gl
        hr = h_total - hl
        gain = 0.5 * (gl * gl / (hl + lam) + gr * gr / (hr + lam) - parent)
        if gain > best_gain:
            best_gain = gain
            best_thr = (values[i] + values[i + 1]) / 2.0
            found = True
    if not found:
        return 0.0, 0.0, False
    return best_gain, best_thr, True


@njit(cache=True)
def smo_precomputed(K, y, C, tol, max_iter):
    n = y.shape[0]
    alpha = np.zeros(n)
    grad = -np.ones(n)

    m = 0.0
    big_m = 0.0
    it = 0
    for it in range(1, max_iter + 1):
        i = -1
        j = -1
        m = -np.inf
        big_m = np.inf
        for k in range(n):
            v = -y[k] * grad[k]
            if (y[k] > 0 and alpha[k] < C) or (y[k] < 0 and alpha[k] > 0):
                if v > m:
                    m = v
                    i = k
            if (y[k] > 0 and alpha[k] > 0) or (y[k] < 0 and alpha[k] < C):
                if v < big_m:
                    big_m = v
                    j = k
        if i < 0 or j < 0:
            return alpha, grad, 0.0, 0.0, it - 1, True
        if m - big_m <= tol:
            return alpha, grad, m, big_m, it - 1, True

        quad = K[i, i] + K[j, j] - 2.0 * K[i, j]
        if quad <= 1e-12:
            quad = 1e-12
        t = (m - big_m) / quad
        bound_i = C - alpha[i] if y[i] > 0 else alpha[i]
        bound_j = alpha[j] if y[j] > 0 else C - alpha[j]
        if bound_i < t:
            t = bound_i
        if bound_j < t:
            t = bound_j

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

        for k in range(n):
            grad[k] += y[k] * t * (K[i, k] - K[j, k])

    return alpha, grad, m, big_m, it, False
