"""Compiled per-path step for the drift-implicit schemes.

One call advances every column of a ``(k, n)`` state by

    x' = decay * x + dw + c_exp * F(x) + c_imp * F(x'),
    F_i(x) = sum_{j != i} 1 / (x_i - x_j),

solving for ``x'`` by Newton on the convex barrier objective
``phi = 1/2 |x' - y|^2 - c_imp sum_{i<j} log(x'_j - x'_i)`` with
fraction-to-boundary and Armijo safeguards. Mirrors :func:`betadyson.sde.implicit_solve`, which is
the vectorised reference.
"""

import math

import numpy as np
from numba import njit


@njit(cache=True)
def _repulsion_into(x, out):
    k = x.shape[0]
    for i in range(k):
        out[i] = 0.0
    for i in range(k):
        for j in range(i + 1, k):
            inv = 1.0 / (x[j] - x[i])
            out[i] -= inv
            out[j] += inv


@njit(cache=True)
def _barrier(x, y, c):
    k = x.shape[0]
    val = 0.0
    for i in range(k):
        d = x[i] - y[i]
        val += 0.5 * d * d
    for i in range(k):
        for j in range(i + 1, k):
            val -= c * math.log(x[j] - x[i])
    return val


@njit(cache=True)
def _solve(H, g, s):
    k = g.shape[0]
    for i in range(k):
        s[i] = g[i]
    for p in range(k):
        for r in range(p + 1, k):
            f = H[r, p] / H[p, p]
            for q in range(p, k):
                H[r, q] -= f * H[p, q]
            s[r] -= f * s[p]
    for p in range(k - 1, -1, -1):
        acc = s[p]
        for q in range(p + 1, k):
            acc -= H[p, q] * s[q]
        s[p] = acc / H[p, p]


@njit(cache=True)
def _ordered(x):
    for i in range(x.shape[0] - 1):
        if not x[i + 1] > x[i]:
            return False
    return True


@njit(cache=True)
def _safe_start(y, c, x):
    k = y.shape[0]
    for i in range(k):
        x[i] = y[i]
    x.sort()
    gap = math.sqrt(c)
    for i in range(1, k):
        if x[i] < x[i - 1] + gap:
            x[i] = x[i - 1] + gap
    shift = 0.0
    for i in range(k):
        shift += y[i] - x[i]
    shift /= k
    for i in range(k):
        x[i] += shift


@njit(cache=True, nogil=True)
def theta_step(x, dw, decay, c_exp, c_imp, tol, max_iter):
    """Return ``(new_state, index of first non-converged column or -1)``."""
    k, n = x.shape
    out = np.empty_like(x)
    xn = np.empty(k)
    y = np.empty(k)
    f = np.empty(k)
    cur = np.empty(k)
    g = np.empty(k)
    s = np.empty(k)
    trial = np.empty(k)
    H = np.empty((k, k))
    failed = -1
    for p in range(n):
        for i in range(k):
            xn[i] = x[i, p]
        if k > 1:
            _repulsion_into(xn, f)
        else:
            f[0] = 0.0
        scale = 1.0
        for i in range(k):
            y[i] = decay * xn[i] + dw[i, p] + c_exp * f[i]
            if abs(y[i]) + 1.0 > scale:
                scale = abs(y[i]) + 1.0
        if k == 1:
            out[0, p] = y[0]
            continue
        if k == 2:
            # the gap solves g = d + 2 c / g
            mid = 0.5 * (y[0] + y[1])
            d = y[1] - y[0]
            gap = 0.5 * (d + math.sqrt(d * d + 8.0 * c_imp))
            out[0, p] = mid - 0.5 * gap
            out[1, p] = mid + 0.5 * gap
            continue
        for i in range(k):
            cur[i] = y[i] + c_imp * f[i]
        converged = False
        # fixed point x <- y + c F(x): a contraction with rate at most
        # rho = 2 (k - 1) c / min_gap^2, which is tiny away from collisions
        if _ordered(cur):
            for _ in range(max_iter):
                _repulsion_into(cur, f)
                min_gap = cur[1] - cur[0]
                for i in range(1, k - 1):
                    if cur[i + 1] - cur[i] < min_gap:
                        min_gap = cur[i + 1] - cur[i]
                rho = 2.0 * (k - 1) * c_imp / (min_gap * min_gap)
                if rho >= 0.1:
                    break
                delta = 0.0
                for i in range(k):
                    trial[i] = y[i] + c_imp * f[i]
                    if abs(trial[i] - cur[i]) > delta:
                        delta = abs(trial[i] - cur[i])
                if not _ordered(trial):
                    break
                for i in range(k):
                    cur[i] = trial[i]
                if delta * rho / (1.0 - rho) <= tol * scale:
                    converged = True
                    break
        else:
            _safe_start(y, c_imp, cur)
        if not _ordered(cur):
            _safe_start(y, c_imp, cur)
        for _ in range(0 if converged else max_iter):
            for i in range(k):
                g[i] = cur[i] - y[i]
                for j in range(k):
                    H[i, j] = 0.0
                H[i, i] = 1.0
            min_gap = np.inf
            for i in range(k):
                for j in range(i + 1, k):
                    d = cur[j] - cur[i]
                    inv = 1.0 / d
                    g[i] += c_imp * inv
                    g[j] -= c_imp * inv
                    w = c_imp * inv * inv
                    H[i, i] += w
                    H[j, j] += w
                    H[i, j] = -w
                    H[j, i] = -w
                    if j == i + 1 and d < min_gap:
                        min_gap = d
            _solve(H, g, s)
            alpha = 1.0
            size = 0.0
            for i in range(k):
                if abs(s[i]) > size:
                    size = abs(s[i])
            for i in range(k - 1):
                dg = s[i + 1] - s[i]
                if dg > 0:
                    lim = 0.99 * (cur[i + 1] - cur[i]) / dg
                    if lim < alpha:
                        alpha = lim
            # phi / c_imp is self-concordant: once the Newton decrement
            # lambda is below 1/4 the full step is safe and converges
            # quadratically; before that, Armijo backtracking
            dec = 0.0
            for i in range(k):
                dec += g[i] * s[i]
            if dec >= 0.0625 * c_imp:
                phi0 = _barrier(cur, y, c_imp)
                for _h in range(60):
                    for i in range(k):
                        trial[i] = cur[i] - alpha * s[i]
                    if _barrier(trial, y, c_imp) <= phi0 - 1e-4 * alpha * dec:
                        break
                    alpha *= 0.5
            for i in range(k):
                cur[i] -= alpha * s[i]
            if alpha == 1.0 and (size <= tol * scale or size * size <= tol * scale * min_gap):
                converged = True
                break
        if not converged and failed < 0:
            failed = p
        for i in range(k):
            out[i, p] = cur[i]
    return out, failed
