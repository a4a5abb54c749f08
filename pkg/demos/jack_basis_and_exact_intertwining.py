"""
Jack polynomials and exact intertwining
=======================================

Jack polynomials diagonalise the Dyson generators up to lower-order terms,
which makes the semigroups finite triangular matrices on each Jack subspace.
This script builds a few of them, looks at the generator matrix, and checks
the intertwining identity coefficient by coefficient at a small beta.
"""

# %%
# Building Jack polynomials
# -------------------------
# ``J_(2)`` in two variables has monomial coefficients ``(1 + theta)/theta``
# and ``2``. At ``theta = 1/3`` rational arithmetic keeps them exact.
from fractions import Fraction

from betadyson import JackParams, build_jack, cached_basis, jack_norm

for theta in (Fraction(1, 3), 1.0):
    J = build_jack(JackParams(theta, 2), (2,))
    print(f"theta={theta}:", {str(mu): c for mu, c in J.coeffs.items()},
          " J(1,1) =", jack_norm(JackParams(theta, 2), (2,)))

# %%
# The generator on the Jack basis
# -------------------------------
# The Dyson Brownian motion generator lowers the degree by two, so its matrix
# is strictly lower triangular and nilpotent.
from betadyson import build_generator_matrix

basis = cached_basis(0.25, 3, (3, 1))
M = build_generator_matrix(basis)
print(M.to_csv())

# %%
# Exact intertwining at beta = 1/2
# --------------------------------
# Applying the kernel then the 3-level semigroup equals applying the 2-level
# semigroup then the kernel. Both sides are finite sums over sub-partitions.
from betadyson import verify_intertwining_exact

rep = verify_intertwining_exact(0.25, 2, (3, 1), t=1.5)
for mu, (lhs, rhs) in rep.per_coefficient.items():
    print(f"{str(mu):>6}  {lhs: .15e}  {rhs: .15e}")
print("scaled error", rep.scaled_error, "passed", rep.passed)

# %%
# The same for the Ornstein-Uhlenbeck version, whose generator also carries
# the diagonal ``-|mu|/2``.
print(verify_intertwining_exact(0.25, 2, (3, 1), t=1.5, kind="dou").scaled_error)
