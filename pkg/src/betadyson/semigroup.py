"""Exact semigroup action on Jack subspaces and the exact intertwining checks.

On the span of ``{J_mu : mu contained in kappa}`` the DBM generator lowers
degree by two, so its matrix is nilpotent and ``exp(tM)`` is a finite sum.
The DOU generator adds ``-|mu|/2`` on the diagonal; its exponential is
computed by a block Parlett recurrence over weight classes (each diagonal
block is scalar and distinct weights never coincide).

The Dixon-Anderson kernel maps ``J_mu`` in ``k`` variables to
``c_mu^(k) J_mu`` in ``k + 1`` variables, so on this subspace it is the
diagonal matrix ``C = diag(c_mu^(k))`` and intertwining reads
``C exp(t M_k) = exp(t M_{k+1}) C``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .jack import cached_basis
from .operators import GeneratorMatrix, Kind, apply_A, apply_A_ou, build_generator_matrix
from .partitions import Partition

#: Default tolerance for exact-path checks, relative to the largest coefficient.
EXACT_TOL = 1e-10


# -- matrix exponentials ------------------------------------------------------

def expm_nilpotent(N: np.ndarray, t: float = 1.0) -> np.ndarray:
    """``exp(tN)`` for nilpotent ``N`` as the terminating series."""
    n = N.shape[0]
    out = np.eye(n)
    term = np.eye(n)
    for p in range(1, n + 1):
        term = term @ N * (t / p)
        if not term.any():
            break
        out = out + term
    return out


def expm_block_triangular(T: np.ndarray, blocks: np.ndarray, t: float = 1.0) -> np.ndarray:
    """``exp(tT)`` for lower-triangular ``T`` that is scalar on each diagonal block.

    ``blocks`` labels every row with its block; rows of one block must be
    contiguous, blocks ordered so that ``T`` is block lower triangular, and the
    scalar diagonal values of different blocks distinct. Off-diagonal blocks
    follow from ``TF = FT`` block by block,
    ``(l_i - l_j) F_ij = F_ii T_ij - T_ij F_jj + sum_{j<m<i} (F_im T_mj - T_im F_mj)``,
    with the first difference taken through ``expm1`` so small ``t`` keeps full
    relative accuracy.
    """
    n = T.shape[0]
    labels = list(dict.fromkeys(blocks.tolist()))
    sl = [np.flatnonzero(blocks == b) for b in labels]
    lam = [T[s[0], s[0]] for s in sl]
    for s, lv in zip(sl, lam):
        block = T[np.ix_(s, s)]
        if not np.allclose(block, lv * np.eye(len(s)), atol=0, rtol=0):
            raise ValueError("diagonal blocks must be scalar multiples of the identity")
    F = np.zeros((n, n))
    for b, s in enumerate(sl):
        F[np.ix_(s, s)] = math.exp(t * lam[b]) * np.eye(len(s))
    nb = len(sl)
    for gap in range(1, nb):
        for j in range(nb - gap):
            i = j + gap
            si, sj = sl[i], sl[j]
            d = lam[i] - lam[j]
            rhs = np.zeros((len(si), len(sj)))
            for m in range(j + 1, i):
                sm = sl[m]
                rhs += F[np.ix_(si, sm)] @ T[np.ix_(sm, sj)] - T[np.ix_(si, sm)] @ F[np.ix_(sm, sj)]
            lead = math.exp(t * lam[j]) * math.expm1(t * d) / d
            F[np.ix_(si, sj)] = lead * T[np.ix_(si, sj)] + rhs / d
    return F


def expm_graded_dou(N: np.ndarray, weights: np.ndarray, t: float) -> np.ndarray:
    """Closed form ``exp(t(N - D/2)) = exp(-tD/2) exp((1 - e^-t) N)`` for
    ``D = diag(weights)`` and ``N`` lowering weight by exactly two.

    Independent of :func:`expm_block_triangular`; used to cross-check it.
    """
    return np.diag(np.exp(-0.5 * t * weights)) @ expm_nilpotent(N, -math.expm1(-t))


# -- semigroup on the Jack subspace ---------------------------------------------

@dataclass(frozen=True)
class SemigroupAction:
    gen: GeneratorMatrix
    t: float
    expm: np.ndarray

    @classmethod
    def at(cls, gen: GeneratorMatrix, t: float) -> "SemigroupAction":
        if t < 0:
            raise ValueError("time must be nonnegative")
        if gen.kind is Kind.DBM:
            E = expm_nilpotent(gen.entries, t)
        elif t == 0:
            E = np.eye(len(gen.basis_index))
        else:
            E = expm_block_triangular(gen.entries, gen.weights, t)
        return cls(gen, float(t), E)


def semigroup(theta, k: int, kappa_max, t: float, kind=Kind.DBM) -> SemigroupAction:
    basis = cached_basis(theta, k, Partition(kappa_max))
    return SemigroupAction.at(build_generator_matrix(basis, kind), t)


def semigroup_apply(action: SemigroupAction, coeffs: Mapping) -> dict[Partition, float]:
    """Jack coefficients of ``P(t) sum a_mu J_mu`` (as a polynomial in the start point)."""
    v = action.expm @ action.gen.vector(coeffs)
    return {mu: float(x) for mu, x in zip(action.gen.basis_index, v) if x != 0}


# -- Dixon-Anderson eigenvalues --------------------------------------------------

def log_kernel_factor(theta, k: int, kappa) -> float:
    theta = float(theta)
    kappa = Partition(kappa)
    s = math.lgamma((k + 1) * theta) - math.lgamma(theta)
    for i in range(1, k + 1):
        part = kappa.part(i)
        s += math.lgamma((k + 1 - i) * theta + part) - math.lgamma((k + 2 - i) * theta + part)
    return s


def kernel_factor(theta, k: int, kappa) -> float:
    """``c_kappa^(k)``: the Dixon-Anderson kernel maps ``J_kappa`` (``k`` variables)
    to ``c_kappa^(k) J_kappa`` (``k + 1`` variables).
    """
    kappa = Partition(kappa)
    if len(kappa) > k:
        raise ValueError(f"{kappa} has more than {k} parts")
    if not kappa:
        return 1.0
    return math.exp(log_kernel_factor(theta, k, kappa))


def pochhammer_ratio(theta, k: int, kappa) -> float:
    """``J_kappa(1_k)/J_kappa(1_{k+1}) prod_m Gamma((k+2-m)theta + kappa_m)/Gamma((k+1-m)theta + kappa_m)``,
    which should equal ``Gamma((k+1)theta)/Gamma(theta)`` for every ``kappa``.
    """
    from .jack import JackParams, log_jack_norm

    theta_f = float(theta)
    kappa = Partition(kappa)
    s = log_jack_norm(JackParams(theta, k), kappa) - log_jack_norm(JackParams(theta, k + 1), kappa)
    for m in range(1, k + 1):
        part = kappa.part(m)
        s += math.lgamma((k + 2 - m) * theta_f + part) - math.lgamma((k + 1 - m) * theta_f + part)
    return math.exp(s)


# -- reports -------------------------------------------------------------------

@dataclass
class IntertwiningReport:
    theta: float
    k: int
    kappa: Partition
    t: float | None
    kind: str
    max_abs_error: float
    scale: float
    tolerance: float
    per_coefficient: dict = field(default_factory=dict)

    @property
    def scaled_error(self) -> float:
        return self.max_abs_error / self.scale if self.scale else self.max_abs_error

    @property
    def passed(self) -> bool:
        return self.scaled_error <= self.tolerance

    def to_dict(self) -> dict:
        return {
            "theta": self.theta,
            "k": self.k,
            "kappa": list(self.kappa),
            "t": self.t,
            "kind": self.kind,
            "max_abs_error": self.max_abs_error,
            "scaled_error": self.scaled_error,
            "tolerance": self.tolerance,
            "passed": self.passed,
            "per_coefficient": [
                {"mu": list(mu), "lhs": lhs, "rhs": rhs} for mu, (lhs, rhs) in self.per_coefficient.items()
            ],
        }


def _report(theta, k, kappa, t, kind, lhs: dict, rhs: dict, tol) -> IntertwiningReport:
    keys = list(dict.fromkeys(list(lhs) + list(rhs)))
    per = {mu: (float(lhs.get(mu, 0.0)), float(rhs.get(mu, 0.0))) for mu in keys}
    err = max((abs(a - b) for a, b in per.values()), default=0.0)
    scale = max((max(abs(a), abs(b)) for a, b in per.values()), default=0.0)
    return IntertwiningReport(float(theta), k, Partition(kappa), t, Kind(kind).value, err, scale, tol, per)


def _matrices(theta, k: int, kappa: Partition, kind: Kind):
    Mk = build_generator_matrix(cached_basis(theta, k, kappa), kind)
    Mk1 = build_generator_matrix(cached_basis(theta, k + 1, kappa), kind)
    # lowering never increases length, so both sides live on the same index
    assert Mk.basis_index == Mk1.basis_index
    return Mk, Mk1


def verify_intertwining_exact(theta, k: int, kappa, t: float, kind=Kind.DBM, tol: float = EXACT_TOL) -> IntertwiningReport:
    """Compare ``L P_k(t) J_kappa`` with ``P_{k+1}(t) L J_kappa`` coefficientwise.

    LHS coefficients are ``a_mu(t) c_mu^(k)`` with ``a = exp(t M_k) e_kappa``;
    RHS coefficients are ``c_kappa^(k) b_mu(t)`` with ``b = exp(t M_{k+1}) e_kappa``.
    """
    kappa, kind = Partition(kappa), Kind(kind)
    Mk, Mk1 = _matrices(theta, k, kappa, kind)
    a = semigroup_apply(SemigroupAction.at(Mk, t), {kappa: 1.0})
    b = semigroup_apply(SemigroupAction.at(Mk1, t), {kappa: 1.0})
    ck = kernel_factor(theta, k, kappa)
    lhs = {mu: v * kernel_factor(theta, k, mu) for mu, v in a.items()}
    rhs = {mu: ck * v for mu, v in b.items()}
    return _report(theta, k, kappa, t, kind, lhs, rhs, tol)


def verify_generator_intertwining(theta, k: int, kappa, kind=Kind.DBM, tol: float = EXACT_TOL) -> IntertwiningReport:
    """Compare ``L A^(k) J_kappa`` with ``A^(k+1) L J_kappa`` as polynomials in
    ``k + 1`` variables, both sides computed by direct differentiation.
    """
    kappa, kind = Partition(kappa), Kind(kind)
    op = apply_A if kind is Kind.DBM else apply_A_ou
    bk = cached_basis(theta, k, kappa)
    bk1 = cached_basis(theta, k + 1, kappa)
    image = bk.to_jack_basis(op(bk.polys[kappa], theta))
    lhs_poly = bk1.from_jack_basis({mu: a * kernel_factor(theta, k, mu) for mu, a in image.items()})
    rhs_poly = op(bk1.polys[kappa], theta).scale(kernel_factor(theta, k, kappa))
    return _report(theta, k, kappa, None, kind, dict(lhs_poly.coeffs), dict(rhs_poly.coeffs), tol)


def verify_matrix_identity(theta, k: int, kappa, t: float, kind=Kind.DBM) -> tuple[float, float]:
    """Residuals of ``C M_k = M_{k+1} C`` and ``C exp(tM_k) = exp(tM_{k+1}) C``
    (max abs, relative to the largest entry involved).
    """
    kappa, kind = Partition(kappa), Kind(kind)
    Mk, Mk1 = _matrices(theta, k, kappa, kind)
    C = np.diag([kernel_factor(theta, k, mu) for mu in Mk.basis_index])
    g1, g2 = C @ Mk.entries, Mk1.entries @ C
    Ek = SemigroupAction.at(Mk, t).expm
    Ek1 = SemigroupAction.at(Mk1, t).expm
    e1, e2 = C @ Ek, Ek1 @ C

    def rel(x, y):
        s = max(np.abs(x).max(), np.abs(y).max(), 1e-300)
        return float(np.abs(x - y).max() / s)

    return rel(g1, g2), rel(e1, e2)


def verify_iterated_intertwining(theta, k: int, n: int, kappa, t: float, kind=Kind.DBM, tol: float = 1e-9) -> IntertwiningReport:
    """``L^(k) ... L^(n-1) P_k(t) = P_n(t) L^(k) ... L^(n-1)`` on ``J_kappa``."""
    kappa, kind = Partition(kappa), Kind(kind)
    if n <= k:
        raise ValueError("need n > k")

    def chain(mu):
        out = 1.0
        for m in range(k, n):
            out *= kernel_factor(theta, m, mu)
        return out

    a = semigroup_apply(SemigroupAction.at(build_generator_matrix(cached_basis(theta, k, kappa), kind), t), {kappa: 1.0})
    d = semigroup_apply(SemigroupAction.at(build_generator_matrix(cached_basis(theta, n, kappa), kind), t), {kappa: 1.0})
    lhs = {mu: v * chain(mu) for mu, v in a.items()}
    rhs = {mu: chain(kappa) * v for mu, v in d.items()}
    return _report(theta, k, kappa, t, kind, lhs, rhs, tol)


def exact_jack_moment(theta, k: int, kappa, x0, t: float, kind=Kind.DBM) -> float:
    """``E[J_kappa(X(t)) | X(0) = x0]`` from the exact semigroup (Monte Carlo oracle)."""
    kappa = Partition(kappa)
    basis = cached_basis(theta, k, kappa)
    coeffs = semigroup_apply(SemigroupAction.at(build_generator_matrix(basis, kind), t), {kappa: 1.0})
    x0 = np.asarray(x0, dtype=float)
    return float(sum(c * basis.polys[mu].eval(x0) for mu, c in coeffs.items()))


__all__ = [
    "EXACT_TOL",
    "IntertwiningReport",
    "SemigroupAction",
    "exact_jack_moment",
    "expm_block_triangular",
    "expm_graded_dou",
    "expm_nilpotent",
    "kernel_factor",
    "pochhammer_ratio",
    "semigroup",
    "semigroup_apply",
    "verify_generator_intertwining",
    "verify_intertwining_exact",
    "verify_iterated_intertwining",
    "verify_matrix_identity",
]
