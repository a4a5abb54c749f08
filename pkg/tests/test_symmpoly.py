import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from betadyson.symmpoly import SymPoly, multiply

from conftest import P, close, sympolys


def m(k, *parts, c=1.0):
    return SymPoly.monomial(k, P(*parts), c)


def test_eval_examples():
    assert m(2, 1).eval(np.array([3.0, 4.0])) == 7
    assert m(3, 1, 1).eval(np.ones(3)) == 3
    assert (m(2, 2) + m(2, 1, 1, c=2.0)).eval(np.array([1.0, 2.0])) == 9


def test_eval_at_ones_examples():
    assert m(5, 1).eval_at_ones() == 5
    assert m(4, 1, 1).eval_at_ones() == 6
    assert m(3, 2, 1).eval_at_ones() == 6


def test_shift_examples():
    assert m(2, 1).shift_by_ones().allclose(m(2, 1) + SymPoly.constant(2, 2.0))
    assert m(2, 2).shift_by_ones().allclose(m(2, 2) + m(2, 1, c=2.0) + SymPoly.constant(2, 2.0))
    assert SymPoly.constant(3).shift_by_ones().allclose(SymPoly.constant(3))


def test_arithmetic_examples():
    assert multiply(m(2, 1), m(2, 1)).allclose(m(2, 2) + m(2, 1, 1, c=2.0))
    p = m(3, 2, 1)
    assert (p + SymPoly.zero(3)).allclose(p)
    assert not m(2, 2).scale(0)


def test_rejects_long_partitions():
    with pytest.raises(ValueError):
        SymPoly.monomial(2, P(1, 1, 1))


def test_from_dense_requires_symmetry():
    with pytest.raises(ValueError):
        SymPoly.from_dense(2, {(1, 0): 1.0})
    assert SymPoly.from_dense(2, {(1, 0): 1.0, (0, 1): 1.0}).allclose(m(2, 1))


def test_json_round_trip():
    p = m(3, 2, 1, c=1.5) + m(3, 1, c=-2.0)
    assert SymPoly.from_json(p.to_json()).allclose(p)


def test_batched_eval(rng):
    p = m(3, 2, 1) + m(3, 1, 1, 1, c=0.5)
    x = rng.normal(size=(7, 3))
    vals = p.eval(x)
    assert vals.shape == (7,)
    assert np.allclose(vals, [p.eval(row) for row in x])


points = st.lists(st.floats(-1.5, 1.5, allow_nan=False), min_size=4, max_size=4)


@given(sympolys(), points)
def test_shift_matches_translated_eval(p, xs):
    x = np.array(xs[: p.k])
    assert close(p.shift_by_ones().eval(x), p.eval(x + 1.0), rtol=1e-12, atol=1e-10)


@given(sympolys(), points)
def test_symmetry_of_eval(p, xs):
    x = np.array(xs[: p.k])
    assert close(p.eval(x), p.eval(x[::-1]), rtol=1e-12, atol=1e-12)


@given(st.integers(1, 3).flatmap(lambda k: st.tuples(sympolys(k, 4, 3), sympolys(k, 4, 3))), points)
def test_product_evaluates_pointwise(pq, xs):
    p, q = pq
    x = np.array(xs[: p.k])
    assert close(multiply(p, q).eval(x), p.eval(x) * q.eval(x), rtol=1e-11, atol=1e-10)


@given(sympolys())
def test_shift_preserves_degree_and_top_piece(p):
    s = p.shift_by_ones()
    assert s.degree == p.degree
    top = p.degree
    assert s.homogeneous(top).allclose(p.homogeneous(top), atol=1e-12)
