"""Acceptance criteria 1-10 at their stated tolerances and time budgets.

Each test records one ``criterion N: PASS|FAIL`` line, printed at the end of
the pytest run (and directly when this file is executed as a script).
Monte Carlo seeds are fixed here once; they are not tuned.
"""

import math
import time

import numpy as np
import pytest
from scipy import stats as sps

from betadyson.dixon_anderson import (
    da_cdf_k1,
    da_integrate,
    da_moment_exact,
    da_moment_mc,
    da_sample,
    da_sample_rejection,
)
from betadyson.jack import JackParams, build_jack, cached_basis, jack_norm
from betadyson.operators import apply_A, apply_B1, apply_B2, apply_B3, jack_action_B1, jack_action_B2
from betadyson.partitions import Partition, partitions_of
from betadyson.rmt import corner_pipeline
from betadyson.sde import (
    Process,
    SdeConfig,
    bessel_slope_mc,
    dou_relaxation_mc,
    mc_intertwining,
    mc_jack_moment,
    squared_radius_slope,
)
from betadyson.semigroup import (
    exact_jack_moment,
    pochhammer_ratio,
    verify_generator_intertwining,
    verify_intertwining_exact,
)
from betadyson.symmpoly import SymPoly

from conftest import ACCEPTANCE_LINES

THETAS = (0.25, 0.5, 1.0, 2.0, 3.7)
KS = (1, 2, 3)
KAPPAS = ((1,), (2,), (1, 1), (2, 1), (2, 2), (3, 1))
TIMES = (0.1, 1.0, 5.0)
KINDS = ("dbm", "dou")
Z_MAX = 3.0


def grid():
    for theta in THETAS:
        for k in KS:
            for kappa in KAPPAS:
                if len(kappa) <= k:
                    yield theta, k, Partition(kappa)


def record(n, ok, detail, elapsed, budget):
    in_time = elapsed <= budget
    status = "PASS" if ok and in_time else "FAIL"
    line = f"criterion {n:>2}: {status}  {detail}  [{elapsed:.1f} s / {budget:g} s]"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line
    assert in_time, line


def test_criterion_01_exact_intertwining():
    start = time.perf_counter()
    worst, count = 0.0, 0
    for theta, k, kappa in grid():
        for kind in KINDS:
            for t in TIMES:
                worst = max(worst, verify_intertwining_exact(theta, k, kappa, t, kind).scaled_error)
                count += 1
    record(1, worst <= 1e-10, f"{count} cases, max scaled error {worst:.2e} (tol 1e-10)",
           time.perf_counter() - start, 10)


def test_criterion_02_generator_intertwining():
    start = time.perf_counter()
    worst, count = 0.0, 0
    for theta, k, kappa in grid():
        for kind in KINDS:
            worst = max(worst, verify_generator_intertwining(theta, k, kappa, kind).scaled_error)
            count += 1
    record(2, worst <= 1e-10, f"{count} cases, max scaled error {worst:.2e} (tol 1e-10)",
           time.perf_counter() - start, 5)


def random_poly(rng, k, max_degree=8, terms=6):
    coeffs = {}
    pool = [mu for d in range(max_degree + 1) for mu in partitions_of(d, max_length=k)]
    for idx in rng.choice(len(pool), size=min(terms, len(pool)), replace=False):
        coeffs[pool[idx]] = rng.uniform(-1, 1)
    return SymPoly(k, coeffs)


def test_criterion_03_commutator():
    start = time.perf_counter()
    rng = np.random.default_rng(20240603)
    worst = 0.0
    for n in range(50):
        k = int(rng.integers(1, 5))
        theta = float(rng.choice([0.25, 0.5, 1.0, 2.0, 3.7]))
        p = random_poly(rng, k)
        lhs = apply_B1(apply_B2(p, theta)) - apply_B2(apply_B1(p), theta)
        worst = max(worst, (lhs - apply_A(p, theta)).norm() / p.norm())
    record(3, worst <= 1e-11, f"50 polynomials (deg <= 8, k <= 4), max ||(B1B2-B2B1-A)p||/||p|| = {worst:.2e}",
           time.perf_counter() - start, 5)


def test_criterion_04_closed_forms():
    start = time.perf_counter()
    worst, worst_b3, count = 0.0, 0.0, 0
    for theta in (0.5, 1.0, 2.0):
        for k in (1, 2, 3, 4):
            for d in range(7):
                for kappa in partitions_of(d, max_length=k):
                    basis = cached_basis(theta, k, kappa)
                    J = basis.jack(kappa)
                    for closed, direct in ((jack_action_B1, apply_B1), (jack_action_B2, apply_B2)):
                        a = closed(basis, kappa)
                        b = basis.to_jack_basis(direct(J, theta))
                        scale = max([1.0] + [abs(v) for v in b.values()])
                        for mu in set(a) | set(b):
                            worst = max(worst, abs(a.get(mu, 0) - b.get(mu, 0)) / scale)
                    worst_b3 = max(worst_b3, (apply_B3(J) - J.scale(d)).norm() / J.norm())
                    count += 1
    ok = worst <= 1e-10 and worst_b3 <= 1e-12
    record(4, ok, f"{count} (theta, k, kappa): B1/B2 max error {worst:.2e} (tol 1e-10), "
                  f"B3 max error {worst_b3:.2e} (tol 1e-12)", time.perf_counter() - start, 30)


def test_criterion_05_norms_and_pochhammer():
    start = time.perf_counter()
    worst_norm, worst_poch = 0.0, 0.0
    for theta, k, kappa in grid():
        params = JackParams(theta, k)
        ref = jack_norm(params, kappa)
        worst_norm = max(worst_norm, abs(build_jack(params, kappa).eval_at_ones() - ref) / ref)
        target = math.exp(math.lgamma((k + 1) * theta) - math.lgamma(theta))
        worst_poch = max(worst_poch, abs(pochhammer_ratio(theta, k, kappa) - target) / target)
    ok = worst_norm <= 1e-10 and worst_poch <= 1e-10
    record(5, ok, f"norm rel. error {worst_norm:.2e}, Pochhammer rel. error {worst_poch:.2e} (tol 1e-10)",
           time.perf_counter() - start, 5)


def test_criterion_06_kernel_moments():
    start = time.perf_counter()
    worst_rel = 0.0
    for theta in (0.5, 1.0, 2.0):
        for top in ((0.0, 1.0), (0.0, 1.0, 2.5)):
            k = len(top) - 1
            for kappa in ((1,), (2,)):
                Jk = build_jack(JackParams(theta, k), kappa)
                val = da_integrate(top, theta, lambda x: float(Jk.eval(x)))
                ref = da_moment_exact(top, theta, kappa)
                worst_rel = max(worst_rel, abs(val - ref) / abs(ref))
    rng = np.random.default_rng(606)
    worst_z = 0.0
    for theta in (0.5, 1.0, 2.0):
        for top in ((0.0, 1.0, 3.0), (0.0, 1.0, 3.0, 3.5)):
            for kappa in ((1,), (2,), (1, 1), (2, 1)):
                est = da_moment_mc(top, theta, kappa, 100_000, rng)
                worst_z = max(worst_z, abs(est.z_score(da_moment_exact(top, theta, kappa))))
    ok = worst_rel <= 1e-6 and worst_z <= Z_MAX
    record(6, ok, f"(a) quadrature rel. error {worst_rel:.2e} (tol 1e-6); (b) 24 MC moments, max |z| {worst_z:.2f}",
           time.perf_counter() - start, 180)


def test_criterion_07_sampler_validation():
    start = time.perf_counter()
    rng = np.random.default_rng(707)
    top1 = (0.0, 2.0)
    min_p = 1.0
    for theta in (0.25, 0.5, 1.0, 2.0):
        x = da_sample(top1, theta, rng, size=100_000).ravel()
        min_p = min(min_p, sps.kstest(x, lambda v: da_cdf_k1(top1, theta, v)).pvalue)
    crit = sps.norm.isf(0.005)
    worst_z = 0.0
    for theta in (0.25, 0.5, 1.0, 2.0):
        for top in ((0.0, 1.0), (0.0, 1.0, 2.5), (0.0, 1.0, 2.5, 3.0)):
            a = np.atleast_2d(da_sample(top, theta, rng, size=50_000)).reshape(50_000, -1)
            b = da_sample_rejection(top, theta, rng, size=50_000).reshape(50_000, -1)
            for f in (lambda x: x.sum(axis=1), lambda x: (x * x).sum(axis=1)):
                fa, fb = f(a), f(b)
                z = (fa.mean() - fb.mean()) / math.sqrt(fa.var(ddof=1) / fa.size + fb.var(ddof=1) / fb.size)
                worst_z = max(worst_z, abs(z))
    ok = min_p > 0.01 and worst_z <= crit
    record(7, ok, f"KS min p-value {min_p:.3f} (> 0.01); roots vs rejection max |z| {worst_z:.2f} (<= {crit:.3f})",
           time.perf_counter() - start, 180)


def test_criterion_08_sde_weak_correctness():
    start = time.perf_counter()
    parts, ok = [], True
    seeds = iter(np.random.SeedSequence(808).generate_state(16))
    worst = 0.0
    for beta in (0.5, 1.0, 2.0, 4.0):
        for k in (2, 3):
            cfg = SdeConfig(beta=beta, dim=k, t_final=1.0, dt=1e-3, paths=100_000, seed=int(next(seeds)))
            est = bessel_slope_mc(np.arange(k, dtype=float), cfg)
            worst = max(worst, abs(est.z_score(squared_radius_slope(beta, k))))
    ok &= worst <= Z_MAX
    parts.append(f"Bessel slopes max |z| {worst:.2f}")
    worst = 0.0
    for beta in (0.5, 2.0):
        cfg = SdeConfig(beta=beta, dim=3, t_final=2.0, dt=1e-3, paths=100_000, seed=int(next(seeds)))
        for t, est, exact in dou_relaxation_mc([-1.0, 0.5, 3.0], cfg, (0.5, 1.0, 1.5, 2.0)):
            worst = max(worst, abs(est.z_score(exact)))
    ok &= worst <= Z_MAX
    parts.append(f"DOU relaxation max |z| {worst:.2f}")
    worst = 0.0
    for process in Process:
        cfg = SdeConfig(beta=2.0, dim=2, t_final=0.5, dt=5e-4, paths=100_000, seed=int(next(seeds)))
        est = mc_jack_moment(process, [0.0, 1.0], cfg, (2,))
        worst = max(worst, abs(est.z_score(exact_jack_moment(1.0, 2, (2,), [0.0, 1.0], 0.5, process.value))))
    ok &= worst <= Z_MAX
    parts.append(f"J_(2) moment max |z| {worst:.2f}")
    record(8, ok, "; ".join(parts), time.perf_counter() - start, 600)


def test_criterion_09_mc_intertwining():
    start = time.perf_counter()
    seeds = iter(np.random.SeedSequence(909).generate_state(16))
    worst, label, failures = 0.0, "", []
    for beta in (0.5, 1.0, 2.0):
        for k in (2, 3):
            for t in (0.5, 1.0):
                cfg = SdeConfig(beta=beta, dim=k, t_final=t, paths=100_000, seed=int(next(seeds)))
                rep = mc_intertwining(np.arange(k + 1, dtype=float), cfg, (2,))
                for name, z in rep.z_scores.items():
                    if abs(z) > Z_MAX:
                        failures.append(f"beta={beta} k={k} t={t} {name} z={z:+.2f}")
                    if abs(z) > worst:
                        worst, label = abs(z), f"beta={beta} k={k} t={t} {name}"
    detail = f"12 configs x 4 statistics, max |z| {worst:.2f} at {label}"
    if failures:
        detail += "; failing: " + ", ".join(failures)
    record(9, not failures, detail, time.perf_counter() - start, 600)


def test_criterion_10_matrix_replication():
    start = time.perf_counter()
    worst, violations = 0.0, 0
    for top, seed in (((0.0, 1.0, 3.0), 1010), ((0.0, 1.0, 2.0, 4.0), 1011)):
        rep = corner_pipeline(top, 1.0, 50_000, seed)
        worst = max(worst, max(abs(z) for z in rep.z_scores.values()))
        violations += rep.interlacing_violations
    ok = worst <= Z_MAX and violations == 0
    record(10, ok, f"k = 2, 3: max |z| {worst:.2f}, interlacing violations {violations}",
           time.perf_counter() - start, 300)


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q"]))
