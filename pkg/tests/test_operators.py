from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from betadyson.jack import cached_basis
from betadyson.operators import (
    Kind,
    apply_A,
    apply_A_ou,
    apply_B1,
    apply_B2,
    apply_B3,
    build_generator_matrix,
    generator_matrix_direct,
    jack_action_B1,
    jack_action_B2,
)
from betadyson.partitions import EMPTY
from betadyson.symmpoly import SymPoly

from conftest import THETAS, P, close, partitions, sympolys

thetas = st.sampled_from(THETAS)


def test_fixtures():
    for k in (1, 2, 3, 4):
        assert apply_B1(SymPoly.monomial(k, P(1))).allclose(SymPoly.constant(k, float(k)))
    for theta in (0.5, 1.0, 2.0):
        for k in (2, 3):
            J2 = cached_basis(theta, k, P(2)).jack(P(2))
            assert apply_A(J2, theta).allclose(SymPoly.constant(k, k * (1 + k * theta) / theta))


@given(partitions(6, 4), st.integers(1, 4), thetas)
def test_euler_operator_on_jacks(kappa, k, theta):
    if len(kappa) > k:
        return
    J = cached_basis(theta, k, kappa).jack(kappa)
    assert apply_B3(J).allclose(J.scale(kappa.weight), rtol=1e-12)


def test_closed_form_fixtures():
    for k in (1, 2, 3):
        basis = cached_basis(1.5, k, P(1))
        assert close(jack_action_B1(basis, P(1))[EMPTY], k)
        assert jack_action_B1(basis, EMPTY) == {}
        assert jack_action_B2(basis, EMPTY) == {}


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_B2_on_J1_carries_half_factor(k):
    # direct differentiation fixes the normalisation of the closed form
    theta = 0.7
    basis = cached_basis(theta, k, P(1))
    direct = apply_B2(basis.jack(P(1)), theta)
    assert direct.allclose(SymPoly.constant(k, k * (k - 1) * theta / 2), atol=1e-12)
    assert close(jack_action_B2(basis, P(1)).get(EMPTY, 0.0), k * (k - 1) * theta / 2)


@given(partitions(6, 4), st.integers(1, 4), st.sampled_from([0.5, 1.0, 2.0]))
def test_closed_forms_match_direct_route(kappa, k, theta):
    if len(kappa) > k:
        return
    basis = cached_basis(theta, k, kappa)
    J = basis.jack(kappa)
    for closed, direct in ((jack_action_B1, apply_B1), (jack_action_B2, apply_B2)):
        a = closed(basis, kappa)
        b = basis.to_jack_basis(direct(J, theta))
        scale = max([1.0] + [abs(v) for v in b.values()])
        for mu in set(a) | set(b):
            assert abs(a.get(mu, 0) - b.get(mu, 0)) <= 1e-10 * scale


@given(sympolys(max_degree=8), thetas)
def test_commutator_identity(p, theta):
    lhs = apply_B1(apply_B2(p, theta)) - apply_B2(apply_B1(p), theta)
    assert (lhs - apply_A(p, theta)).norm() <= 1e-11 * max(p.norm(), 1.0)


def test_commutator_exact_in_rationals():
    theta = Fraction(3, 7)
    p = SymPoly(3, {P(3, 1): Fraction(2), P(2, 2, 1): Fraction(-1, 3), P(1): Fraction(5)})
    lhs = apply_B1(apply_B2(p, theta)) - apply_B2(apply_B1(p), theta)
    diff = lhs - apply_A(p, theta)
    assert all(c == 0 for c in diff.coeffs.values())


@given(sympolys(max_degree=5, max_terms=3), thetas, st.integers(0, 10_000))
def test_generator_against_finite_differences(p, theta, seed):
    k = p.k
    rng = np.random.default_rng(seed)
    x = np.sort(rng.uniform(-1, 1, size=k)) + np.arange(k) * 0.5
    h = 1e-3
    f = p.eval
    val = 0.0
    for i in range(k):
        e = np.zeros(k)
        e[i] = h
        d2 = (f(x + e) - 2 * f(x) + f(x - e)) / h ** 2
        d1 = (f(x + e) - f(x - e)) / (2 * h)
        val += 0.5 * d2 + theta * sum(d1 / (x[i] - x[j]) for j in range(k) if j != i)
    assert close(apply_A(p, theta).eval(x), val, rtol=1e-4, atol=1e-4 * max(1.0, p.norm()) * 10)


def test_dou_generator_shift():
    p = SymPoly(2, {P(2): 1.0, P(1): 3.0})
    assert apply_A_ou(p, 1.0).allclose(apply_A(p, 1.0) - apply_B3(p).scale(0.5))


def test_generator_matrix_fixtures():
    for theta in (0.5, 1.0):
        for k in (1, 2, 3):
            M = build_generator_matrix(cached_basis(theta, k, P(1)))
            assert not M.entries.any()
            M = build_generator_matrix(cached_basis(theta, k, P(2)))
            assert close(M.entries[M.position[EMPTY], M.position[P(2)]], k * (1 + k * theta) / theta)
            D = build_generator_matrix(cached_basis(theta, k, P(2)), Kind.DOU)
            assert close(D.entries[D.position[P(2)], D.position[P(2)]], -1.0)


@given(partitions(6, 3), st.integers(1, 3), thetas, st.sampled_from(list(Kind)))
def test_matrix_routes_agree(kappa, k, theta, kind):
    if len(kappa) > k:
        return
    basis = cached_basis(theta, k, kappa)
    a = build_generator_matrix(basis, kind).entries
    b = generator_matrix_direct(basis, kind).entries
    assert np.abs(a - b).max() <= 1e-10 * max(1.0, np.abs(b).max())


@given(partitions(7, 3), st.integers(1, 3), thetas)
def test_dbm_matrix_is_nilpotent(kappa, k, theta):
    if len(kappa) > k:
        return
    M = build_generator_matrix(cached_basis(theta, k, kappa)).entries
    power = np.linalg.matrix_power(M, kappa.weight // 2 + 1)
    assert not power.any()
    assert not np.triu(M).any()


def test_csv_export():
    M = build_generator_matrix(cached_basis(1.0, 2, P(2)))
    lines = M.to_csv().splitlines()
    assert lines[0] == "row\\col,(2),(1),()"
    assert len(lines) == 1 + len(M.basis_index)
