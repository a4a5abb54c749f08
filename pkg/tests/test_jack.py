import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from betadyson.jack import JackBasis, JackParams, SpanError, build_jack, cached_basis, jack_eigenvalue, jack_norm
from betadyson.operators import apply_opjack
from betadyson.partitions import EMPTY, dominates, partitions_of
from betadyson.semigroup import pochhammer_ratio
from betadyson.symmpoly import SymPoly

from conftest import THETAS, P, close, partitions

thetas = st.sampled_from(THETAS)


@pytest.mark.parametrize("theta", [0.25, 0.5, 1.0, 3.7])
@pytest.mark.parametrize("k", [1, 2, 4])
def test_low_degree_fixtures(theta, k):
    params = JackParams(theta, k)
    assert build_jack(params, EMPTY).allclose(SymPoly.constant(k))
    assert build_jack(params, P(1)).allclose(SymPoly.monomial(k, P(1)))
    assert close(jack_norm(params, P(1)), k)
    assert close(jack_norm(params, P(2)), k * (k * theta + 1) / theta)
    assert jack_norm(params, EMPTY) == 1
    if k >= 2:
        expected = SymPoly(k, {P(2): (1 + theta) / theta, P(1, 1): 2.0})
        assert build_jack(params, P(2)).allclose(expected, rtol=1e-12)


def test_exact_mode_is_rational():
    theta = Fraction(1, 3)
    J = build_jack(JackParams(theta, 3), P(2))
    assert J.coeff(P(2)) == (1 + theta) / theta
    assert J.coeff(P(1, 1)) == 2
    assert jack_norm(JackParams(theta, 3), P(2, 1)) == build_jack(JackParams(theta, 3), P(2, 1)).eval_at_ones()


def test_rejects_bad_input():
    with pytest.raises(ValueError):
        JackParams(0.0, 2)
    with pytest.raises(ValueError):
        JackParams(1.0, 0)
    with pytest.raises(ValueError):
        build_jack(JackParams(1.0, 2), P(1, 1, 1))


def schur(kappa, x):
    k = len(x)
    lam = list(kappa) + [0] * (k - len(kappa))
    num = np.array([[xi ** (lam[j] + k - 1 - j) for j in range(k)] for xi in x])
    den = np.array([[xi ** (k - 1 - j) for j in range(k)] for xi in x])
    return np.linalg.det(num) / np.linalg.det(den)


@given(partitions(6, 3), st.lists(st.floats(0.1, 2.0), min_size=3, max_size=3, unique=True))
def test_theta_one_is_schur(kappa, xs):
    x = np.sort(np.array(xs))
    if np.min(np.diff(x)) < 1e-2:
        return
    J = build_jack(JackParams(1.0, 3), kappa)
    ratio = J.eval(x) / J.eval_at_ones()
    expected = schur(kappa, x) / _schur_at_ones(kappa, 3)
    assert close(ratio, expected, rtol=1e-8, atol=1e-10)


def _schur_at_ones(kappa, k):
    # hook-content formula
    lam = list(kappa)
    out = 1.0
    for i, row in enumerate(lam):
        for j in range(row):
            arm = row - j - 1
            leg = sum(1 for r in lam[i + 1:] if r > j)
            out *= (k + j - i) / (arm + leg + 1)
    return out


@given(partitions(8, 5), st.integers(1, 5), thetas)
def test_eigenfunction_residual(kappa, k, theta):
    if len(kappa) > k:
        return
    J = build_jack(JackParams(theta, k), kappa)
    resid = apply_opjack(J, theta) - J.scale(jack_eigenvalue(kappa, theta, k))
    assert resid.norm() <= 1e-9 * J.norm()


@given(partitions(8, 5), st.integers(1, 5), thetas)
def test_normalisation_consistency(kappa, k, theta):
    if len(kappa) > k:
        return
    params = JackParams(theta, k)
    assert close(build_jack(params, kappa).eval_at_ones(), jack_norm(params, kappa), rtol=1e-10)


@given(partitions(6, 4), st.integers(1, 4), st.sampled_from([0.25, 0.5, 1.0, 2.0, 3.7]))
def test_pochhammer_identity(kappa, k, theta):
    if len(kappa) > k:
        return
    target = math.exp(math.lgamma((k + 1) * theta) - math.lgamma(theta))
    assert close(pochhammer_ratio(theta, k, kappa), target, rtol=1e-10)


@given(partitions(8, 4), st.integers(1, 4), st.floats(0.05, 20))
def test_dominated_eigenvalues_are_strictly_lower(kappa, k, theta):
    if len(kappa) > k:
        return
    lam = jack_eigenvalue(kappa, theta, k)
    for mu in partitions_of(kappa.weight, max_length=k):
        if mu != kappa and dominates(kappa, mu):
            assert jack_eigenvalue(mu, theta, k) < lam


def test_change_of_basis_examples():
    basis = JackBasis.full(JackParams(1.0, 2), 2)
    assert basis.to_jack_basis(SymPoly.zero(2)) == {}
    for mu in basis.index:
        coeffs = basis.to_jack_basis(basis.jack(mu))
        assert close(coeffs[mu], 1.0)
        assert all(abs(c) < 1e-12 for nu, c in coeffs.items() if nu != mu)
    m2 = SymPoly.monomial(2, P(2))
    coeffs = basis.to_jack_basis(m2)
    c11 = basis.jack(P(1, 1)).coeff(P(1, 1))
    assert close(coeffs[P(2)], 0.5)
    assert close(coeffs[P(1, 1)], -1.0 / c11)
    assert basis.from_jack_basis(coeffs).allclose(m2, atol=1e-12)


def test_span_error():
    basis = cached_basis(1.0, 2, P(2))
    with pytest.raises(SpanError):
        basis.to_jack_basis(SymPoly.monomial(2, P(3)))


@pytest.mark.parametrize("theta", [0.5, 1.0, 2.0])
def test_binomial_examples(theta):
    basis = cached_basis(theta, 3, P(3, 1))
    for kappa in basis.index:
        assert close(basis.binom(kappa, kappa), 1.0)
    assert close(basis.binom(P(1), EMPTY), 1.0)
    assert close(basis.binom(P(2), P(1)), 2.0)
    assert basis.binom(P(1), P(2)) == 0


@given(partitions(6, 3), st.integers(1, 3), thetas)
def test_binomial_resummation(kappa, k, theta):
    if len(kappa) > k:
        return
    basis = cached_basis(theta, k, kappa)
    table = basis.binomial_coefficients(kappa)
    rebuilt = SymPoly.zero(k)
    for rho, b in table.items():
        rebuilt = rebuilt + basis.jack(rho).scale(b / basis.norms[rho])
    target = basis.jack(kappa).shift_by_ones().scale(1 / basis.norms[kappa])
    assert rebuilt.allclose(target, atol=1e-10 * max(1.0, target.norm()), rtol=1e-10)


@given(partitions(8, 4), st.integers(1, 4), st.floats(1e-3, 50.0))
def test_eigenvalue_gap_positive_below_kappa(kappa, k, theta):
    # dominance back-substitution never divides by zero for positive theta
    if len(kappa) > k:
        return
    lam = jack_eigenvalue(kappa, theta, k)
    for mu in partitions_of(kappa.weight, max_length=k):
        if mu != kappa and dominates(kappa, mu):
            assert lam - jack_eigenvalue(mu, theta, k) > 0
