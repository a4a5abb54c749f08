"""Jack symmetric polynomials ``J_kappa(z; theta)`` in ``k`` variables.

``J_kappa`` is the eigenfunction of the operator
``sum z_i^2 d_i^2 + 2 theta sum_{i!=j} z_i^2/(z_i - z_j) d_i`` whose leading
monomial is ``m_kappa``, scaled so that

    J_kappa(1_k) = theta**-|kappa| prod_i Gamma((k+1-i) theta + kappa_i) / Gamma((k+1-i) theta).

The operator is triangular on monomials in dominance order, so ``J_kappa`` is
obtained by back-substitution over partitions dominated by ``kappa``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .operators import apply_opjack
from .partitions import EMPTY, Partition, dominates, partitions_of, sort_key, sub_partitions
from .symmpoly import SymPoly

#: Eigenvalue separation below which a build is reported as degenerate.
DEGENERACY_TOL = 1e-8


class DegenerateThetaError(ArithmeticError):
    """Two eigenvalues of the Jack operator coincide at this theta."""


class SpanError(ValueError):
    """A polynomial has a monomial outside the span of a Jack basis."""


@dataclass(frozen=True)
class JackParams:
    theta: float
    k: int

    def __post_init__(self):
        if not self.theta > 0:
            raise ValueError(f"theta must be positive, got {self.theta}")
        if int(self.k) != self.k or self.k < 1:
            raise ValueError(f"k must be a positive integer, got {self.k}")

    @property
    def beta(self):
        return 2 * self.theta

    @property
    def exact(self) -> bool:
        return isinstance(self.theta, Fraction)

    def with_k(self, k: int) -> "JackParams":
        return JackParams(self.theta, k)


def jack_eigenvalue(mu: Partition, theta, k: int):
    """Eigenvalue ``sum mu_i (mu_i - 1) + 2 theta sum (k - i) mu_i``."""
    return sum(m * (m - 1) for m in mu) + 2 * theta * sum((k - i) * m for i, m in enumerate(mu, start=1))


def log_jack_norm(params: JackParams, kappa) -> float:
    theta, k = float(params.theta), params.k
    s = -sum(kappa) * math.log(theta)
    for i, part in enumerate(kappa, start=1):
        a = (k + 1 - i) * theta
        s += math.lgamma(a + part) - math.lgamma(a)
    return s


def jack_norm(params: JackParams, kappa) -> float:
    """``J_kappa(1_k; theta)`` via log-Gamma differences.

    Exact (``Fraction``) parameters use the equivalent finite product
    ``prod_i prod_{j <= kappa_i} (k + 1 - i + (j - 1)/theta)``.
    """
    kappa = Partition(kappa)
    if len(kappa) > params.k:
        raise ValueError(f"{kappa} has more than {params.k} parts")
    if params.exact:
        return jack_norm_product(params, kappa)
    return math.exp(log_jack_norm(params, kappa))


def jack_norm_product(params: JackParams, kappa):
    out = Fraction(1) if params.exact else 1.0
    for i, part in enumerate(kappa, start=1):
        for j in range(1, part + 1):
            out *= params.k + 1 - i + (j - 1) / params.theta
    return out


@lru_cache(maxsize=4096)
def _opjack_column(theta, k: int, mu: Partition) -> SymPoly:
    return apply_opjack(SymPoly.monomial(k, mu, Fraction(1) if isinstance(theta, Fraction) else 1.0), theta)


def build_jack(params: JackParams, kappa) -> SymPoly:
    """Monomial expansion of ``J_kappa(.; theta)`` in ``params.k`` variables.

    Raises
    ------
    ValueError
        if ``kappa`` has more than ``k`` parts.
    DegenerateThetaError
        if an eigenvalue of a dominated partition is within
        ``DEGENERACY_TOL`` of the eigenvalue of ``kappa``.
    """
    kappa = Partition(kappa)
    theta, k = params.theta, params.k
    if len(kappa) > k:
        raise ValueError(f"{kappa} has more than {k} parts")
    one = Fraction(1) if params.exact else 1.0
    if not kappa:
        return SymPoly.constant(k, one)
    cands = [mu for mu in partitions_of(kappa.weight, max_length=k) if dominates(kappa, mu)]
    columns = {mu: _opjack_column(theta, k, mu) for mu in cands}
    lam = jack_eigenvalue(kappa, theta, k)
    coeffs = {kappa: one}
    for nu in cands[1:]:
        diag = columns[nu].coeff(nu)
        gap = lam - diag
        if abs(gap) < DEGENERACY_TOL:
            raise DegenerateThetaError(f"eigenvalues of {kappa} and {nu} coincide at theta={theta}")
        acc = 0
        for mu, c in coeffs.items():
            acc += c * columns[mu].coeff(nu)
        coeffs[nu] = acc / gap
    poly = SymPoly(k, coeffs)
    return poly.scale(jack_norm(params, kappa) / poly.eval_at_ones())


@dataclass
class JackBasis:
    """Jack polynomials ``{J_mu}`` for a set of partitions, with their values at ``1_k``.

    Built once via :meth:`build` (all ``mu`` contained in ``kappa_max``) or
    :meth:`full` (all ``mu`` up to a given weight); treat as read-only.
    """

    params: JackParams
    index: tuple[Partition, ...]
    polys: dict[Partition, SymPoly]
    norms: dict[Partition, float]
    kappa_max: Partition | None = None
    _binom: dict = field(default_factory=dict, repr=False)

    @classmethod
    def build(cls, params: JackParams, kappa_max) -> "JackBasis":
        kappa_max = Partition(kappa_max)
        if len(kappa_max) > params.k:
            raise ValueError(f"{kappa_max} has more than {params.k} parts")
        return cls._from_index(params, sub_partitions(kappa_max, params.k), kappa_max)

    @classmethod
    def full(cls, params: JackParams, degree: int) -> "JackBasis":
        index = [mu for d in range(degree, -1, -1) for mu in partitions_of(d, max_length=params.k)]
        return cls._from_index(params, index, None)

    @classmethod
    def _from_index(cls, params, index, kappa_max):
        index = tuple(sorted(index, key=sort_key))
        polys = {mu: build_jack(params, mu) for mu in index}
        norms = {mu: jack_norm(params, mu) for mu in index}
        return cls(params, index, polys, norms, kappa_max)

    def __contains__(self, mu) -> bool:
        return Partition(mu) in self.polys

    def jack(self, mu) -> SymPoly:
        return self.polys[Partition(mu)]

    def to_jack_basis(self, p: SymPoly, rtol: float = 1e-9) -> dict[Partition, float]:
        """Coefficients ``a_mu`` with ``p = sum a_mu J_mu``.

        Leading monomials are peeled off in weight-major lexicographic order.
        A residual monomial outside the index is dropped if it is below
        ``rtol`` times the size of ``p`` and raises :class:`SpanError`
        otherwise.
        """
        if p.k != self.params.k:
            raise ValueError("variable count mismatch")
        scale = p.norm()
        resid = dict(p.coeffs)
        out: dict[Partition, float] = {}
        while resid:
            mu = min(resid, key=sort_key)
            r = resid.pop(mu)
            if mu not in self.polys:
                if abs(r) > rtol * scale:
                    raise SpanError(f"monomial m{mu} (coefficient {r!r}) is outside the basis span")
                continue
            J = self.polys[mu]
            a = r / J.coeff(mu)
            out[mu] = a
            for nu, c in J.coeffs.items():
                if nu != mu:
                    resid[nu] = resid.get(nu, 0) - a * c
        return dict(sorted(out.items(), key=lambda t: sort_key(t[0])))

    def from_jack_basis(self, coeffs) -> SymPoly:
        out = SymPoly.zero(self.params.k)
        for mu, a in coeffs.items():
            out = out + self.polys[Partition(mu)].scale(a)
        return out

    def binomial_coefficients(self, kappa) -> dict[Partition, float]:
        """Generalized binomial coefficients ``binom(kappa, rho)`` for all ``rho``:
        expand ``J_kappa(1_k + z) / J_kappa(1_k)`` in the basis and multiply the
        coefficient of ``J_rho`` by ``J_rho(1_k)``.
        """
        kappa = Partition(kappa)
        if kappa not in self._binom:
            shifted = self.polys[kappa].shift_by_ones().scale(1 / self.norms[kappa])
            coeffs = self.to_jack_basis(shifted)
            self._binom[kappa] = {rho: a * self.norms[rho] for rho, a in coeffs.items()}
        return self._binom[kappa]

    def binom(self, kappa, rho) -> float:
        return self.binomial_coefficients(kappa).get(Partition(rho), 0)


@lru_cache(maxsize=256)
def cached_basis(theta, k: int, kappa_max: Partition) -> JackBasis:
    """Shared, memoised :meth:`JackBasis.build` (do not mutate the result)."""
    return JackBasis.build(JackParams(theta, k), kappa_max)


__all__ = [
    "DEGENERACY_TOL",
    "DegenerateThetaError",
    "EMPTY",
    "JackBasis",
    "JackParams",
    "SpanError",
    "build_jack",
    "cached_basis",
    "jack_eigenvalue",
    "jack_norm",
    "jack_norm_product",
]
