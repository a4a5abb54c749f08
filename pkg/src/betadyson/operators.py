"""Differential operators on symmetric polynomials and their Jack-basis actions.

Two independent routes are provided:

* direct differential action on the monomial expansion (``apply_*``), where
  every singular drift term ``sum_{i != j} z_i**a / (z_i - z_j) d_i`` is
  evaluated pairwise as a divided difference, so the output is an exact
  polynomial with no rational intermediate;
* closed forms on the Jack basis through generalized binomial coefficients
  (``jack_action_B1``, ``jack_action_B2``, ``build_generator_matrix``).

Normalisation note: with ``B2 = 1/2 sum z_i d_i^2 + theta sum z_i/(z_i-z_j) d_i``
the Jack-basis action carries an overall factor ``1/2`` in front of the
binomial sum (checked against the direct route in the test-suite). The
generator matrix inherits that factor, which makes it represent
``A = B1 B2 - B2 B1`` exactly.
"""

from __future__ import annotations

import csv
import io
from fractions import Fraction
from dataclasses import dataclass
from enum import Enum
from typing import Mapping

import numpy as np

from .partitions import Partition, lowerings, sub_partitions
from .symmpoly import SymPoly

Dense = dict


class Kind(str, Enum):
    DBM = "dbm"
    DOU = "dou"


# -- dense polynomial helpers ----------------------------------------------

def _is_sorted(e) -> bool:
    return all(a >= b for a, b in zip(e, e[1:]))


def _add(out: Dense, e: tuple, c) -> None:
    out[e] = out.get(e, 0) + c


def _diff(p: Dense, i: int) -> Dense:
    out: Dense = {}
    for e, c in p.items():
        if e[i]:
            f = list(e)
            f[i] -= 1
            _add(out, tuple(f), e[i] * c)
    return out


def _second_term(p: Dense, k: int, a: int, canonical_only: bool) -> Dense:
    """``sum_i z_i**a d_i**2 p``."""
    out: Dense = {}
    for e, c in p.items():
        for i in range(k):
            if e[i] >= 2:
                f = list(e)
                f[i] += a - 2
                f = tuple(f)
                if canonical_only and not _is_sorted(f):
                    continue
                _add(out, f, e[i] * (e[i] - 1) * c)
    return out


def _first_term(p: Dense, k: int, a: int, canonical_only: bool) -> Dense:
    """``sum_i z_i**a d_i p``."""
    out: Dense = {}
    for e, c in p.items():
        for i in range(k):
            if e[i]:
                f = list(e)
                f[i] += a - 1
                f = tuple(f)
                if canonical_only and not _is_sorted(f):
                    continue
                _add(out, f, e[i] * c)
    return out


def _drift_term(p: Dense, k: int, a: int, canonical_only: bool) -> Dense:
    """``sum_{i != j} z_i**a / (z_i - z_j) d_i p`` for symmetric ``p``.

    Only pairs ``i < j`` are visited. For such a pair set ``g = z_i**a d_i p``; symmetry of ``p`` gives
    ``z_j**a d_j p = s_ij g`` so the pair contributes the divided difference
    ``(g - s_ij g) / (z_i - z_j)``, expanded monomial by monomial:
    ``(z_i**u z_j**v - z_i**v z_j**u) / (z_i - z_j)
    = z_i**v z_j**v sum_{r < u-v} z_i**(u-v-1-r) z_j**r`` for ``u > v``.
    """
    out: Dense = {}
    for e, c in p.items():
        for i in range(k):
            if not e[i]:
                continue
            coef = e[i] * c
            base = list(e)
            base[i] += a - 1
            for j in range(i + 1, k):
                u, v = base[i], base[j]
                if u == v:
                    continue
                sign = 1
                if u < v:
                    u, v, sign = v, u, -1
                for r in range(u - v):
                    f = list(base)
                    f[i] = u - 1 - r
                    f[j] = v + r
                    f = tuple(f)
                    if canonical_only and not _is_sorted(f):
                        continue
                    _add(out, f, sign * coef)
    return out


def _half(theta):
    return Fraction(1, 2) if isinstance(theta, Fraction) else 0.5


def _combine(k: int, parts) -> SymPoly:
    out: Dense = {}
    for weight, dense in parts:
        if weight == 0:
            continue
        for e, c in dense.items():
            _add(out, e, weight * c)
    return SymPoly.from_dense(k, out, check=False)


# -- direct differential action ---------------------------------------------

def apply_B1(p: SymPoly, theta=None) -> SymPoly:
    """``sum_i d_i``."""
    d = p.expand()
    return _combine(p.k, [(1, _first_term(d, p.k, 0, True))])


def apply_B2(p: SymPoly, theta) -> SymPoly:
    """``1/2 sum_i z_i d_i^2 + theta sum_{i!=j} z_i/(z_i-z_j) d_i``."""
    d = p.expand()
    return _combine(p.k, [(_half(theta), _second_term(d, p.k, 1, True)), (theta, _drift_term(d, p.k, 1, True))])


def apply_B3(p: SymPoly, theta=None) -> SymPoly:
    """Euler operator ``sum_i z_i d_i``: multiplies each homogeneous piece by its degree."""
    d = p.expand()
    return _combine(p.k, [(1, _first_term(d, p.k, 1, True))])


def apply_opjack(p: SymPoly, theta) -> SymPoly:
    """``sum_i z_i^2 d_i^2 + 2 theta sum_{i!=j} z_i^2/(z_i-z_j) d_i`` (Jack eigen-operator)."""
    d = p.expand()
    return _combine(p.k, [(1, _second_term(d, p.k, 2, True)), (2 * theta, _drift_term(d, p.k, 2, True))])


def apply_A(p: SymPoly, theta) -> SymPoly:
    """Dyson Brownian motion generator ``1/2 sum d_i^2 + theta sum_{i!=j} 1/(z_i-z_j) d_i``."""
    d = p.expand()
    return _combine(p.k, [(_half(theta), _second_term(d, p.k, 0, True)), (theta, _drift_term(d, p.k, 0, True))])


def apply_A_ou(p: SymPoly, theta) -> SymPoly:
    """Dyson Ornstein-Uhlenbeck generator ``A - 1/2 B3``."""
    return apply_A(p, theta) - apply_B3(p).scale(_half(theta))


# -- closed forms on the Jack basis -------------------------------------------

def jack_action_B1(basis, kappa) -> dict[Partition, float]:
    """Jack coefficients of ``B1 J_kappa``:
    ``J_kappa(1) binom(kappa, kappa_(i)) / J_{kappa_(i)}(1)`` on ``J_{kappa_(i)}``.
    """
    kappa = Partition(kappa)
    out: dict[Partition, float] = {}
    for _, mu in lowerings(kappa):
        c = basis.norms[kappa] * basis.binom(kappa, mu) / basis.norms[mu]
        out[mu] = out.get(mu, 0) + c
    return out


def jack_action_B2(basis, kappa) -> dict[Partition, float]:
    """Jack coefficients of ``B2 J_kappa``; as :func:`jack_action_B1` with the
    extra factor ``(kappa_i - 1 + (k - i) theta) / 2`` on term ``i``.
    """
    kappa = Partition(kappa)
    theta, k = basis.params.theta, basis.params.k
    out: dict[Partition, float] = {}
    for i, mu in lowerings(kappa):
        w = (kappa[i - 1] - 1 + (k - i) * theta) / 2
        c = w * basis.norms[kappa] * basis.binom(kappa, mu) / basis.norms[mu]
        out[mu] = out.get(mu, 0) + c
    return out


def generator_column(basis, kappa) -> dict[Partition, float]:
    """Jack coefficients of ``A J_kappa``, summed over all two-step lowering
    paths ``kappa -> kappa_(i) -> (kappa_(i))_(j)``.
    """
    kappa = Partition(kappa)
    theta = basis.params.theta
    out: dict[Partition, float] = {}
    for i, mu in lowerings(kappa):
        b1 = basis.binom(kappa, mu)
        for j, nu in lowerings(mu):
            w = kappa[i - 1] - mu[j - 1] + (j - i) * theta
            c = basis.norms[kappa] / basis.norms[nu] * b1 * basis.binom(mu, nu) * w / 2
            out[nu] = out.get(nu, 0) + c
    return out


@dataclass(frozen=True)
class GeneratorMatrix:
    """Matrix of a generator on a Jack subspace.

    ``entries[r, c]`` is the coefficient of ``J_{index[r]}`` in the generator
    applied to ``J_{index[c]}``. The index is weight-major, so DBM matrices
    are strictly lower triangular and DOU matrices lower triangular.
    """

    basis_index: tuple[Partition, ...]
    entries: np.ndarray
    kind: Kind
    theta: float
    k: int

    @property
    def position(self) -> dict[Partition, int]:
        return {mu: n for n, mu in enumerate(self.basis_index)}

    @property
    def weights(self) -> np.ndarray:
        return np.array([mu.weight for mu in self.basis_index], dtype=float)

    def vector(self, coeffs: Mapping) -> np.ndarray:
        pos = self.position
        v = np.zeros(len(self.basis_index))
        for mu, c in coeffs.items():
            mu = Partition(mu)
            if mu not in pos:
                raise KeyError(f"{mu} is not indexed by this generator matrix")
            v[pos[mu]] += float(c)
        return v

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        header = [str(mu) for mu in self.basis_index]
        writer.writerow(["row\\col"] + header)
        for name, row in zip(header, self.entries):
            writer.writerow([name] + [repr(float(x)) for x in row])
        return buf.getvalue()


def build_generator_matrix(basis, kind=Kind.DBM, kappa_max=None) -> GeneratorMatrix:
    """Closed-form generator matrix on ``sub_partitions(kappa_max)``.

    ``kappa_max`` defaults to the basis' own top partition. For ``DOU`` the
    diagonal ``-|mu|/2`` is added.
    """
    kind = Kind(kind)
    kappa_max = basis.kappa_max if kappa_max is None else Partition(kappa_max)
    index = tuple(sub_partitions(kappa_max, basis.params.k))
    pos = {mu: n for n, mu in enumerate(index)}
    M = np.zeros((len(index), len(index)))
    for c, mu in enumerate(index):
        for nu, val in generator_column(basis, mu).items():
            M[pos[nu], c] += float(val)
    if kind is Kind.DOU:
        M -= 0.5 * np.diag([mu.weight for mu in index])
    return GeneratorMatrix(index, M, kind, float(basis.params.theta), basis.params.k)


def generator_matrix_direct(basis, kind=Kind.DBM, kappa_max=None) -> GeneratorMatrix:
    """Generator matrix obtained by differentiating each Jack polynomial and
    re-expanding in the Jack basis (the independent route).
    """
    kind = Kind(kind)
    kappa_max = basis.kappa_max if kappa_max is None else Partition(kappa_max)
    index = tuple(sub_partitions(kappa_max, basis.params.k))
    pos = {mu: n for n, mu in enumerate(index)}
    op = apply_A if kind is Kind.DBM else apply_A_ou
    M = np.zeros((len(index), len(index)))
    for c, mu in enumerate(index):
        for nu, val in basis.to_jack_basis(op(basis.polys[mu], basis.params.theta)).items():
            M[pos[nu], c] += float(val)
    return GeneratorMatrix(index, M, kind, float(basis.params.theta), basis.params.k)
