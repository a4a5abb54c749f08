"""The Dixon-Anderson conditional density and samplers for it.

Given ``x_top`` with ``k + 1`` strictly increasing entries and ``theta > 0``
the density of an interlacing ``x`` (``x_top[i] <= x[i] <= x_top[i+1]``) is

    Gamma((k+1) theta) / Gamma(theta)**(k+1)
      * prod_{i<j} (x_top[j] - x_top[i])**(1 - 2 theta)
      * prod_{i<j} (x[j] - x[i])
      * prod_{i,j} |x[i] - x_top[j]|**(theta - 1).

The primary sampler draws ``w ~ Dirichlet(theta, ..., theta)`` and returns the
``k`` roots of ``sum_j w_j / (z - x_top[j]) = 0``, one per gap of ``x_top``.
A rejection sampler (independent Beta proposals per gap) serves as a
cross-check for small ``k``.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import integrate, special

from .partitions import Partition
from .stats import Estimate

MAX_ITER = 200


class TieError(ValueError):
    """Top-level points are not strictly increasing."""


def as_ordered(x, strict: bool = False, name: str = "x") -> np.ndarray:
    """Validate a weakly (or strictly) increasing 1-d vector."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.size == 0:
        raise ValueError(f"{name} must be a non-empty 1-d vector")
    if not np.all(np.isfinite(x)):
        raise ValueError(f"{name} has non-finite entries")
    d = np.diff(x)
    if np.any(d < 0):
        raise ValueError(f"{name} is not weakly increasing")
    if strict and np.any(d == 0):
        i = int(np.flatnonzero(d == 0)[0])
        raise TieError(f"{name} has a tie in gap {i}: {x[i]!r} == {x[i + 1]!r}")
    return x


def jitter_ties(x, eps: float | None = None) -> np.ndarray:
    """Separate tied entries by multiples of ``eps`` (default ``1e-9 * scale``)."""
    x = np.sort(np.asarray(x, dtype=float))
    if eps is None:
        eps = 1e-9 * max(1.0, float(np.ptp(x)), float(np.abs(x).max()))
    out = x.copy()
    for i in range(1, out.size):
        if out[i] <= out[i - 1]:
            out[i] = out[i - 1] + eps
    return out


# -- density -----------------------------------------------------------------

def log_normaliser(x_top: np.ndarray, theta: float) -> float:
    k1 = x_top.size
    s = math.lgamma(k1 * theta) - k1 * math.lgamma(theta)
    gaps = x_top[None, :] - x_top[:, None]
    iu = np.triu_indices(k1, 1)
    return s + (1 - 2 * theta) * float(np.log(gaps[iu]).sum())


def da_log_density(x_top, x, theta: float):
    """Log of the density at ``x`` (shape ``(k,)`` or ``(n, k)``); ``-inf`` off the support."""
    x_top = as_ordered(x_top, strict=True, name="x_top")
    x = np.asarray(x, dtype=float)
    k = x_top.size - 1
    if x.ndim == 0 and k == 1:
        x = x.reshape(1)
    if x.shape[-1:] != (k,):
        raise ValueError(f"expected trailing dimension {k}, got {x.shape}")
    scalar = x.ndim == 1
    x = np.atleast_2d(x)
    inside = np.all((x >= x_top[:-1]) & (x <= x_top[1:]), axis=-1)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.full(x.shape[0], log_normaliser(x_top, theta))
        iu = np.triu_indices(k, 1)
        if k > 1:
            diffs = x[:, None, :] - x[:, :, None]
            out = out + np.log(diffs[:, iu[0], iu[1]]).sum(axis=-1)
        if theta != 1:
            dist = np.abs(x[:, :, None] - x_top[None, None, :])
            out = out + (theta - 1) * np.log(dist).sum(axis=(1, 2))
    out = np.where(inside, out, -np.inf)
    out = np.where(np.isnan(out), -np.inf, out)
    return float(out[0]) if scalar else out


def da_density(x_top, x, theta: float):
    """Dixon-Anderson density ``Lambda^(k)(x_top, x)`` with ``beta = 2 theta``.

    On the boundary of the support the value follows the sign of
    ``theta - 1``: ``+inf`` for ``theta < 1``, ``0`` for ``theta > 1``.
    """
    return np.exp(da_log_density(x_top, x, theta))


def da_integrate(x_top, theta: float, f=None, epsrel: float = 1e-11, epsabs: float = 0.0) -> float:
    """Integrate ``f(x) * Lambda(x_top, x)`` over the interlacing set (k = 1, 2).

    The endpoint factors ``(x - a)**(theta-1) (b - x)**(theta-1)`` of each gap
    are handled as algebraic weights by QUADPACK's QAWS rule, so integrable
    singularities for ``theta < 1`` cost nothing extra.
    """
    x_top = as_ordered(x_top, strict=True, name="x_top")
    k = x_top.size - 1
    f = (lambda x: 1.0) if f is None else f
    a = theta - 1
    lognorm = log_normaliser(x_top, theta)
    opts = dict(weight="alg", wvar=(a, a), epsabs=epsabs, epsrel=epsrel, limit=200)
    if k == 1:
        val, _ = integrate.quad(lambda u: f(np.array([u])), x_top[0], x_top[1], **opts)
        return math.exp(lognorm) * val
    if k == 2:
        l0, l1, l2 = x_top

        def inner(x2):
            g = lambda x1: (x2 - x1) * abs(x1 - l2) ** a * f(np.array([x1, x2]))
            return integrate.quad(g, l0, l1, **opts)[0]

        val, _ = integrate.quad(lambda x2: abs(x2 - l0) ** a * inner(x2), l1, l2, **opts)
        return math.exp(lognorm) * val
    raise NotImplementedError("quadrature is implemented for k = 1 and k = 2")


def da_cdf_k1(x_top, theta: float, x) -> np.ndarray:
    """CDF of the ``k = 1`` density (a scaled Beta(theta, theta) law)."""
    x_top = as_ordered(x_top, strict=True, name="x_top")
    if x_top.size != 2:
        raise ValueError("da_cdf_k1 needs a 2-point top level")
    u = (np.asarray(x, dtype=float) - x_top[0]) / (x_top[1] - x_top[0])
    return special.betainc(theta, theta, np.clip(u, 0.0, 1.0))


def da_cdf_k1_quad(x_top, theta: float, x: float) -> float:
    """Same CDF by quadrature of :func:`da_density` (slow; for checking)."""
    x_top = as_ordered(x_top, strict=True, name="x_top")
    a = theta - 1
    if x <= x_top[0]:
        return 0.0
    if x >= x_top[1]:
        return 1.0
    val, _ = integrate.quad(
        lambda u: abs(u - x_top[1]) ** a, x_top[0], x, weight="alg", wvar=(a, 0.0), epsabs=0, epsrel=1e-12, limit=200
    )
    return math.exp(log_normaliser(x_top, theta)) * val


# -- sampling -------------------------------------------------------------------

def log_gamma_variates(shape: float, size, rng: np.random.Generator) -> np.ndarray:
    """``log G`` for ``G ~ Gamma(shape)``.

    For ``shape < 1`` uses ``G = G' U**(1/shape)`` with ``G' ~ Gamma(shape + 1)``,
    kept in log space so tiny variates do not underflow.
    """
    if shape >= 1:
        return np.log(rng.gamma(shape, size=size))
    return np.log(rng.gamma(shape + 1, size=size)) + np.log(rng.random(size=size)) / shape


def dirichlet_log_weights(theta: float, k1: int, n: int, rng: np.random.Generator) -> np.ndarray:
    """Unnormalised symmetric Dirichlet weights in log space, shape ``(n, k1)``."""
    return log_gamma_variates(theta, (n, k1), rng)


def secular_roots(x_top: np.ndarray, weights: np.ndarray, tol: float | None = None, max_iter: int = MAX_ITER) -> np.ndarray:
    """Roots of ``sum_j w_j / (z - x_top[j]) = 0``, one per gap, for each row of ``weights``.

    ``x_top`` is either one ordered vector or one per row, shape ``(n, k + 1)``.

    Safeguarded Newton: the iterate stays inside a shrinking bracket
    ``(lo, hi)`` of its gap and falls back to bisection whenever the Newton
    step leaves it. Converges to absolute tolerance ``tol`` (default
    ``1e-12 * span``).
    """
    w = np.atleast_2d(np.asarray(weights, dtype=float))
    n, k1 = w.shape
    k = k1 - 1
    tops = np.broadcast_to(np.asarray(x_top, dtype=float), (n, k1))
    span = tops[:, -1] - tops[:, 0]
    tol = np.broadcast_to(1e-12 * span if tol is None else tol, (n,))[:, None]
    tol = np.broadcast_to(tol, (n, k))
    lo = tops[:, :-1].copy()
    hi = tops[:, 1:].copy()
    z = 0.5 * (lo + hi)
    active = np.ones((n, k), dtype=bool)
    with np.errstate(divide="ignore", invalid="ignore"):
        for _ in range(max_iter):
            idx = np.nonzero(active)
            if idx[0].size == 0:
                break
            zi = z[idx]
            d = zi[:, None] - tops[idx[0]]
            wi = w[idx[0]]
            f = (wi / d).sum(axis=1)
            fp = -(wi / d**2).sum(axis=1)
            lo_i = np.where(f > 0, zi, lo[idx])
            hi_i = np.where(f < 0, zi, hi[idx])
            step = np.where(fp != 0, -f / fp, 0.0)
            znew = zi + step
            bad = ~((znew > lo_i) & (znew < hi_i)) | ~np.isfinite(znew)
            znew = np.where(bad, 0.5 * (lo_i + hi_i), znew)
            tol_i = tol[idx]
            done = (hi_i - lo_i <= tol_i) | (np.abs(znew - zi) <= 0.25 * tol_i) | (f == 0)
            z[idx] = np.where(f == 0, zi, znew)
            lo[idx], hi[idx] = lo_i, hi_i
            active[idx] = ~done
    if active.any():
        i, j = map(int, np.argwhere(active)[0])
        raise ArithmeticError(f"root bracketing failed in gap {j} (sample {i}) after {max_iter} iterations")
    return z


def da_sample(x_top, theta: float, rng: np.random.Generator, size: int | None = None) -> np.ndarray:
    """Draw from ``Lambda^(k)(x_top, .)`` via Dirichlet weights and secular-equation roots.

    Returns shape ``(k,)`` when ``size`` is None, else ``(size, k)``.
    """
    x_top = as_ordered(x_top, strict=True, name="x_top")
    if not theta > 0:
        raise ValueError("theta must be positive")
    n = 1 if size is None else int(size)
    logw = dirichlet_log_weights(theta, x_top.size, n, rng)
    w = np.exp(logw - logw.max(axis=1, keepdims=True))
    x = secular_roots(x_top, w)
    return x[0] if size is None else x


def da_sample_batch(x_tops, theta: float, rng: np.random.Generator) -> np.ndarray:
    """One draw from ``Lambda^(k)(x_tops[r], .)`` per row of ``x_tops``."""
    x_tops = np.asarray(x_tops, dtype=float)
    if x_tops.ndim != 2 or x_tops.shape[1] < 2:
        raise ValueError(f"expected shape (n, k + 1) with k >= 1, got {x_tops.shape}")
    gaps = np.diff(x_tops, axis=1)
    if not (gaps > 0).all():
        r, j = map(int, np.argwhere(~(gaps > 0))[0])
        raise TieError(f"row {r} has tied or unordered levels in gap {j}")
    if not theta > 0:
        raise ValueError("theta must be positive")
    logw = dirichlet_log_weights(theta, x_tops.shape[1], x_tops.shape[0], rng)
    w = np.exp(logw - logw.max(axis=1, keepdims=True))
    return secular_roots(x_tops, w)


def _rejection_bound(x_top: np.ndarray, theta: float) -> float:
    k = x_top.size - 1
    logb = 0.0
    for i in range(k):
        for j in range(i + 1, k):
            logb += math.log(x_top[j + 1] - x_top[i])
        for j in range(k + 1):
            if j in (i, i + 1):
                continue
            if j < i:
                near, far = x_top[i] - x_top[j], x_top[i + 1] - x_top[j]
            else:
                near, far = x_top[j] - x_top[i + 1], x_top[j] - x_top[i]
            logb += (theta - 1) * math.log(near if theta < 1 else far)
    return logb


def da_sample_rejection(x_top, theta: float, rng: np.random.Generator, size: int, batch: int | None = None) -> np.ndarray:
    """Rejection sampler: independent scaled Beta(theta, theta) proposals per gap.

    The remaining factors of the density (Vandermonde of ``x`` and distances to
    non-adjacent top points) are bounded on the interlacing box, giving a
    valid acceptance ratio for every ``theta > 0``. Efficient for small ``k``.
    """
    x_top = as_ordered(x_top, strict=True, name="x_top")
    k = x_top.size - 1
    lo, width = x_top[:-1], np.diff(x_top)
    logb = _rejection_bound(x_top, theta)
    batch = batch or max(1024, 2 * size)
    out = []
    got = 0
    while got < size:
        x = lo + width * rng.beta(theta, theta, size=(batch, k))
        logr = np.zeros(batch)
        for i in range(k):
            for j in range(i + 1, k):
                logr += np.log(x[:, j] - x[:, i])
            for j in range(k + 1):
                if j not in (i, i + 1):
                    logr += (theta - 1) * np.log(np.abs(x[:, i] - x_top[j]))
        accept = np.log(rng.random(batch)) < logr - logb
        out.append(x[accept])
        got += int(accept.sum())
    return np.concatenate(out)[:size]


def da_moment_mc(x_top, theta: float, kappa, n_samples: int, rng: np.random.Generator, sampler: str = "roots") -> Estimate:
    """Monte Carlo estimate of ``E[J_kappa(X)]`` for ``X ~ Lambda^(k)(x_top, .)``."""
    from .jack import JackParams, build_jack

    x_top = as_ordered(x_top, strict=True, name="x_top")
    kappa = Partition(kappa)
    k = x_top.size - 1
    if len(kappa) > k:
        raise ValueError(f"{kappa} has more than {k} parts")
    if not kappa:
        return Estimate(1.0, 0.0, n_samples)
    if sampler == "roots":
        x = da_sample(x_top, theta, rng, size=n_samples)
    elif sampler == "rejection":
        x = da_sample_rejection(x_top, theta, rng, size=n_samples)
    else:
        raise ValueError(f"unknown sampler {sampler!r}")
    J = build_jack(JackParams(theta, k), kappa)
    return Estimate.from_samples(J.eval(x))


def da_moment_exact(x_top, theta: float, kappa) -> float:
    """``c_kappa^(k) J_kappa(x_top)`` with ``J_kappa`` in ``k + 1`` variables."""
    from .jack import JackParams, build_jack
    from .semigroup import kernel_factor

    x_top = as_ordered(x_top, strict=True, name="x_top")
    k = x_top.size - 1
    return kernel_factor(theta, k, kappa) * build_jack(JackParams(theta, k + 1), kappa).eval(x_top)
