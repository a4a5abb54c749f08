"""
Corners of a symmetric matrix Brownian motion
=============================================

At beta = 1 the intertwining has a matrix picture. Conjugate ``diag(x_top)``
by a Haar rotation, add a symmetric matrix Brownian motion, and read the
eigenvalues of the leading corner. They should match 3-level Dyson Brownian
motion followed by the kernel with ``theta = 1/2``.
"""

# %%
from betadyson import corner_pipeline

rep = corner_pipeline([0.0, 1.0, 2.0, 4.0], t=1.0, paths=20_000, seed=5)
print("interlacing violations:", rep.interlacing_violations)
for name, z in rep.z_scores.items():
    print(f"{name:>6}  matrix {rep.matrix[name].mean:9.4f}  dyson {rep.dyson[name].mean:9.4f}  z={z:+.2f}")

# %%
# Entry variances matter
# ----------------------
# Giving every off-diagonal component variance ``t`` (instead of ``t/2``)
# breaks conjugation invariance, and the corner moments drift away.
rep = corner_pipeline([0.0, 1.0, 2.0, 4.0], t=1.0, paths=20_000, seed=5, convention="uniform")
print({name: round(z, 1) for name, z in rep.z_scores.items()})

# %%
# The complex Hermitian version corresponds to beta = 2.
rep = corner_pipeline([0.0, 1.0, 2.0, 4.0], t=1.0, paths=20_000, seed=6, field="complex")
print({name: round(z, 2) for name, z in rep.z_scores.items()})
