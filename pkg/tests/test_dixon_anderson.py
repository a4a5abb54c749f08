import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import stats as sps

from betadyson.dixon_anderson import (
    TieError,
    da_cdf_k1,
    da_cdf_k1_quad,
    da_density,
    da_integrate,
    da_moment_exact,
    da_moment_mc,
    da_sample,
    da_sample_batch,
    da_sample_rejection,
    jitter_ties,
    log_gamma_variates,
    secular_roots,
)
from betadyson.jack import JackParams, build_jack
from betadyson.partitions import EMPTY
from betadyson.semigroup import kernel_factor

from conftest import P, close


def test_density_fixtures():
    assert close(da_density([2.0, 5.0], [3.1], 1.0), 1 / 3)
    assert close(da_density([-1.0, 1.0], [0.0], 0.5), 1 / math.pi)
    assert da_density([0.0, 1.0], [1.5], 0.5) == 0.0


@pytest.mark.parametrize("theta", [0.5, 1.0, 2.0])
@pytest.mark.parametrize("top", [(0.0, 1.3), (-1.0, 0.5, 2.0)])
def test_density_is_normalised(theta, top):
    assert abs(da_integrate(top, theta, epsrel=1e-10) - 1) <= 1e-8


@pytest.mark.parametrize("theta", [0.25, 1.0, 3.0])
def test_cdf_routes_agree(theta):
    top = (0.5, 2.0)
    for x in (0.6, 1.0, 1.9):
        assert close(float(da_cdf_k1(top, theta, x)), da_cdf_k1_quad(top, theta, x), rtol=1e-9)


def test_ties_are_rejected():
    rng = np.random.default_rng(0)
    with pytest.raises(TieError):
        da_sample([0.0, 1.0, 1.0], 1.0, rng, size=5)
    with pytest.raises(TieError):
        da_sample_batch(np.array([[0.0, 1.0, 2.0], [0.0, 2.0, 2.0]]), 1.0, rng)
    spread = jitter_ties([0.0, 1.0, 1.0, 1.0])
    assert np.all(np.diff(spread) > 0) and np.allclose(spread, [0, 1, 1, 1], atol=1e-8)


def test_uniform_case_ks(rng):
    x = da_sample([0.0, 1.0], 1.0, rng, size=100_000)
    assert sps.kstest(x.ravel(), "uniform").pvalue > 0.01


@given(st.integers(1, 4), st.floats(0.1, 4.0), st.integers(0, 2**31))
def test_samples_interlace(k, theta, seed):
    rng = np.random.default_rng(seed)
    top = np.cumsum(rng.uniform(0.01, 2.0, size=k + 1))
    x = np.atleast_2d(da_sample(top, theta, rng, size=200)).reshape(200, k)
    assert np.all(x >= top[:-1]) and np.all(x <= top[1:])


@given(st.integers(1, 5), st.integers(0, 2**31))
def test_secular_roots_solve_the_equation(k, seed):
    rng = np.random.default_rng(seed)
    top = np.cumsum(rng.uniform(0.1, 1.0, size=k + 1))
    w = rng.dirichlet(np.ones(k + 1), size=50)
    z = secular_roots(top, w)
    # residual measured against the size of the individual terms
    terms = w[:, None, :] / (z[:, :, None] - top[None, None, :])
    resid = np.abs(terms.sum(axis=-1)) / np.abs(terms).sum(axis=-1)
    assert resid.max() < 1e-8
    batch = secular_roots(np.broadcast_to(top, (50, k + 1)), w)
    assert np.allclose(batch, z, rtol=0, atol=1e-12 * (top[-1] - top[0]))


@pytest.mark.parametrize("shape", [0.05, 0.25, 0.8, 2.0])
def test_log_gamma_variates(shape, rng):
    g = np.exp(log_gamma_variates(shape, 50_000, rng))
    assert sps.kstest(g, "gamma", args=(shape,)).pvalue > 0.001


def test_moment_fixtures(rng):
    est = da_moment_mc([0.0, 1.0, 3.0], 0.7, EMPTY, 100, rng)
    assert est.mean == 1.0 and est.std_error == 0.0
    est = da_moment_mc([0.0, 1.0, 3.0], 0.75, P(1), 100_000, rng)
    assert abs(est.z_score(8 / 3)) <= 3
    J2 = build_jack(JackParams(1.0, 2), P(2)).eval(np.array([0.0, 1.0]))
    est = da_moment_mc([0.0, 1.0], 1.0, P(2), 100_000, rng)
    assert abs(est.z_score(J2 / 3)) <= 3
    assert close(da_moment_exact([0.0, 1.0], 1.0, P(2)), J2 / 3)


@pytest.mark.parametrize("theta", [0.5, 1.0, 2.0])
@pytest.mark.parametrize("kappa", [(1,), (2,)])
def test_quadrature_matches_kernel_identity(theta, kappa):
    for top in ((0.0, 1.5), (0.0, 1.0, 2.5)):
        k = len(top) - 1
        Jk = build_jack(JackParams(theta, k), kappa)
        val = da_integrate(top, theta, lambda x: float(Jk.eval(x)))
        ref = kernel_factor(theta, k, kappa) * build_jack(JackParams(theta, k + 1), kappa).eval(np.array(top))
        assert close(val, ref, rtol=1e-6)


@pytest.mark.parametrize("theta", [0.5, 2.0])
def test_rejection_sampler_agrees(theta, rng):
    top = [0.0, 1.0, 1.5, 3.0]
    a = da_sample(top, theta, rng, size=40_000)
    b = da_sample_rejection(top, theta, rng, size=40_000)
    for f in (lambda x: x.sum(axis=1), lambda x: (x * x).sum(axis=1)):
        fa, fb = f(a), f(b)
        z = (fa.mean() - fb.mean()) / math.sqrt(fa.var() / fa.size + fb.var() / fb.size)
        assert abs(z) < 3.3
