"""
Sampling the Dixon-Anderson kernel
==================================

Given an ordered top level ``x_top`` the kernel is a law on interlacing
points. Sampling it takes one Dirichlet vector and the roots of a secular
equation, one root per gap.
"""

# %%
import numpy as np

from betadyson import da_moment_exact, da_sample
from betadyson.dixon_anderson import da_sample_rejection

rng = np.random.default_rng(1)
top = np.array([0.0, 1.0, 1.2, 4.0])
x = da_sample(top, 0.25, rng, size=100_000)
print("interlacing holds:", bool(np.all((x >= top[:-1]) & (x <= top[1:]))))

# %%
# Jack moments
# ------------
# The kernel maps ``J_kappa`` in ``k`` variables to a constant multiple of
# ``J_kappa`` in ``k + 1`` variables. Compare a Monte Carlo mean with it.
from betadyson import da_moment_mc

for kappa in [(1,), (2,), (2, 1)]:
    est = da_moment_mc(top, 0.25, kappa, 100_000, rng)
    exact = da_moment_exact(top, 0.25, kappa)
    print(f"kappa={kappa}: MC {est.mean:.5f} +- {est.std_error:.5f}  exact {exact:.5f}  z={est.z_score(exact):+.2f}")

# %%
# A second sampler
# ----------------
# Independent Beta proposals per gap with rejection give the same law; it
# is slower but shares no code with the root finder.
y = da_sample_rejection(top, 0.25, rng, size=50_000)
for name, f in [("p1", lambda v: v.sum(1)), ("p2", lambda v: (v * v).sum(1))]:
    a, b = f(x), f(y)
    z = (a.mean() - b.mean()) / np.sqrt(a.var() / a.size + b.var() / b.size)
    print(f"{name}: roots {a.mean():.4f}  rejection {b.mean():.4f}  z={z:+.2f}")
