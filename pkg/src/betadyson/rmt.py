"""Matrix model at beta = 1 (real symmetric) and beta = 2 (complex Hermitian).

A spectrum ``x_top`` is embedded as ``O diag(x_top) O^*`` with ``O`` Haar on the
orthogonal (unitary) group, the matrix entries are moved by independent
Brownian motions, and the eigenvalues of the leading ``k x k`` corner are
read off. Everything is batched over a leading sample axis.

Entry variance conventions for ``evolve_matrix_bm``:

``"goe"`` (default)
    diagonal ``t``; off-diagonal ``t/2`` (real) or ``t/2`` for each of the
    real and imaginary parts (complex). The law is invariant
    under conjugation and the eigenvalues follow Dyson Brownian motion with
    beta = 1 (resp. 2) and unit diffusion.
``"uniform"``
    every real component of the upper triangle gets variance ``t``. Not conjugation
    invariant; kept so that the two readings of "independent standard
    Brownian motions" can be compared. The squared radius of its spectrum
    grows at rate ``n^2`` instead of ``n(n+1)/2``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .stats import Estimate, two_sample_z

CONVENTIONS = ("goe", "uniform")
FIELDS = {"real": 1, "complex": 2}


def haar_orthogonal(n: int, rng: np.random.Generator, size: int | None = None, field: str = "real") -> np.ndarray:
    """Haar-distributed orthogonal (``field="real"``) or unitary matrices.

    QR of a Gaussian matrix, with the columns rescaled by the phases of
    ``diag(R)`` so that the result does not depend on the QR sign convention.
    A draw with a zero pivot is regenerated.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    if field not in FIELDS:
        raise ValueError(f"field must be one of {tuple(FIELDS)}")
    shape = (1 if size is None else size, n, n)
    while True:
        z = rng.standard_normal(shape)
        if field == "complex":
            z = (z + 1j * rng.standard_normal(shape)) / np.sqrt(2)
        q, r = np.linalg.qr(z)
        d = np.diagonal(r, axis1=1, axis2=2)
        if np.all(np.abs(d) > 0):
            break
    q = q * (d / np.abs(d))[:, None, :]
    return q[0] if size is None else q


def haar_unitary(n: int, rng: np.random.Generator, size: int | None = None) -> np.ndarray:
    return haar_orthogonal(n, rng, size, field="complex")


@dataclass
class SymMatrixState:
    """Batch of symmetric (Hermitian) matrices, shape ``(samples, n, n)``, at a common time.

    The upper triangle is authoritative; :meth:`symmetrised` rebuilds the
    lower triangle from it.
    """

    entries: np.ndarray
    time: float = 0.0
    field: str = "real"
    convention: str = "goe"

    @property
    def n(self) -> int:
        return self.entries.shape[-1]

    def symmetrised(self) -> np.ndarray:
        upper = np.triu(self.entries)
        strict = np.triu(self.entries, 1)
        return upper + np.conj(np.swapaxes(strict, -1, -2))

    def spectrum(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.symmetrised())


def embed_spectrum(x_top, rng: np.random.Generator, size: int | None = None, field: str = "real") -> SymMatrixState:
    """``O diag(x_top) O^*`` with Haar ``O``; ties in ``x_top`` are allowed."""
    x_top = np.asarray(x_top, dtype=float)
    if x_top.ndim != 1 or np.any(np.diff(x_top) < 0):
        raise ValueError("x_top must be a weakly increasing vector")
    o = haar_orthogonal(x_top.size, rng, 1 if size is None else size, field)
    m = (o * x_top[None, None, :]) @ np.conj(np.swapaxes(o, -1, -2))
    return SymMatrixState(m, 0.0, field)


def matrix_increment(n: int, t: float, rng: np.random.Generator, samples: int, field: str = "real",
                     convention: str = "goe") -> np.ndarray:
    """Hermitian Gaussian matrices with the entry variances of ``convention`` at time ``t``."""
    if convention not in CONVENTIONS:
        raise ValueError(f"convention must be one of {CONVENTIONS}")
    # variance of each real component of an off-diagonal entry
    part = t / 2 if convention == "goe" else t
    shape = (samples, n, n)
    g = rng.standard_normal(shape) * np.sqrt(part)
    if field == "complex":
        g = g + 1j * rng.standard_normal(shape) * np.sqrt(part)
    upper = np.triu(g, 1)
    diag = rng.standard_normal((samples, n)) * np.sqrt(t)
    m = upper + np.conj(np.swapaxes(upper, -1, -2))
    idx = np.arange(n)
    m[:, idx, idx] = diag
    return m


def evolve_matrix_bm(state: SymMatrixState, t: float, rng: np.random.Generator, convention: str = "goe") -> SymMatrixState:
    """Add an independent Brownian increment over time ``t``; exact in law."""
    if t < 0:
        raise ValueError("t must be non-negative")
    if t == 0:
        return SymMatrixState(state.symmetrised(), state.time, state.field, convention)
    inc = matrix_increment(state.n, t, rng, state.entries.shape[0], state.field, convention)
    return SymMatrixState(state.symmetrised() + inc, state.time + t, state.field, convention)


def corner_spectrum(state: SymMatrixState, k: int | None = None) -> np.ndarray:
    """Sorted eigenvalues of the leading ``k x k`` block (default ``n - 1``), shape ``(samples, k)``."""
    k = state.n - 1 if k is None else k
    if not 1 <= k <= state.n:
        raise ValueError(f"corner size must be in [1, {state.n}]")
    m = state.symmetrised()[:, :k, :k]
    if not np.isfinite(m).all():
        raise ArithmeticError("non-finite matrix entries")
    return np.linalg.eigvalsh(m)


def interlacing_violations(lower: np.ndarray, upper: np.ndarray, rtol: float = 1e-12) -> int:
    """Number of samples where ``upper[i] <= lower[i] <= upper[i+1]`` fails
    beyond ``rtol`` times the spectral radius.
    """
    lower = np.atleast_2d(lower)
    upper = np.atleast_2d(upper)
    tol = rtol * np.maximum(np.abs(upper).max(axis=1, keepdims=True), 1.0)
    ok = (lower >= upper[:, :-1] - tol) & (lower <= upper[:, 1:] + tol)
    return int((~ok.all(axis=1)).sum())


@dataclass
class CornerReport:
    """Matrix route versus eigenvalue route for the corner spectrum at time ``t``."""

    k: int
    t: float
    x_top: tuple
    convention: str
    field: str
    matrix: dict[str, Estimate]
    dyson: dict[str, Estimate]
    interlacing_violations: int
    samples: int

    @property
    def z_scores(self) -> dict[str, float]:
        return {name: two_sample_z(self.matrix[name], self.dyson[name]) for name in self.matrix}

    def passed(self, z_max: float = 3.0) -> bool:
        return self.interlacing_violations == 0 and all(abs(z) <= z_max for z in self.z_scores.values())

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "t": self.t,
            "x_top": list(self.x_top),
            "convention": self.convention,
            "field": self.field,
            "samples": self.samples,
            "interlacing_violations": self.interlacing_violations,
            "statistics": {
                name: {"matrix": self.matrix[name].to_dict(), "dyson": self.dyson[name].to_dict(), "z": z}
                for name, z in self.z_scores.items()
            },
        }


def corner_pipeline(x_top, t: float, paths: int, seed: int, field: str = "real", convention: str = "goe",
                    kappa=(2,), dt: float | None = None, workers: int = 1) -> CornerReport:
    """Corner eigenvalues of ``embed -> evolve`` against DBM of the full spectrum
    followed by a Dixon-Anderson draw with ``theta = beta / 2``.
    """
    from .dixon_anderson import da_sample_batch
    from .sde import SdeConfig, estimate, simulate_dbm, statistics

    x_top = np.asarray(x_top, dtype=float)
    n = x_top.size
    k = n - 1
    beta = FIELDS[field]
    theta = beta / 2
    draw, matrix_rng, kernel_rng, sim = np.random.SeedSequence(seed).spawn(4)
    state = evolve_matrix_bm(embed_spectrum(x_top, np.random.default_rng(draw), paths, field), t,
                             np.random.default_rng(matrix_rng), convention)
    full = state.spectrum()
    corner = corner_spectrum(state)
    violations = interlacing_violations(corner, full)
    cfg = SdeConfig(beta=float(beta), dim=n, t_final=t, dt=dt, paths=paths, seed=int(sim.generate_state(1)[0]), workers=workers)
    upper = simulate_dbm(x_top, cfg)
    projected = da_sample_batch(upper, theta, np.random.default_rng(kernel_rng))
    plain = SdeConfig(beta=float(beta), dim=k, paths=paths, antithetic=False)
    matrix = {name: estimate(v, plain) for name, v in statistics(corner, theta, kappa).items()}
    dyson = {name: estimate(v, cfg) for name, v in statistics(projected, theta, kappa).items()}
    return CornerReport(k, t, tuple(float(v) for v in x_top), convention, field, matrix, dyson, violations, paths)


__all__ = [
    "CONVENTIONS",
    "CornerReport",
    "SymMatrixState",
    "corner_pipeline",
    "corner_spectrum",
    "embed_spectrum",
    "evolve_matrix_bm",
    "haar_orthogonal",
    "haar_unitary",
    "interlacing_violations",
    "matrix_increment",
]
