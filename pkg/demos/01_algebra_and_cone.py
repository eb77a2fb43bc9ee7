"""
Matrix algebras with a triangular subgroup, and their cones
===========================================================

Build the three stock algebras, check the axioms, multiply two elements
of the rank 3 chain algebra, and decide cone membership by attempting a
triangular factorization.
"""

import numpy as np

from tcone import build_builtin, factorize_K, factorize_Kstar, verify_axioms

# ----------------------------------------------------------------------
# The stock algebras.  "orthant:n" is the diagonal algebra (its cone is
# the nonnegative orthant), "psd:n" the full real matrix algebra (cone of
# positive semidefinite matrices), and "vinberg5" the smallest algebra
# whose cone is homogeneous but not self dual.

for name, alg in [("orthant:4", build_builtin("orthant", 4)),
                  ("psd:3", build_builtin("psd", 3)),
                  ("vinberg5", build_builtin("vinberg5"))]:
    rep = verify_axioms(alg, tol=0.0)
    print("%-9s rank=%d dim=%d herm_dim=%d axioms=%s"
          % (name, alg.rank, alg.dim, alg.dim_herm,
             "ok" if rep.passed else "FAIL"))

# ----------------------------------------------------------------------
# Multiplication is bilinear on block coordinates but not associative.
# The natural chart of vinberg5 packs the Hermitian part as
# (x11, x12, x22, x13, x33); off diagonal entries are shared with the
# transpose slot.

alg = build_builtin("vinberg5")
x = alg.from_natural([5.0, -2.0, 1.0, -2.0, 5.0])
y = alg.from_natural([1.0, 2.0, 4.0, 2.0, 4.0])
xy = alg.mul(x, y)

print("\nproduct blocks of x*y:")
for i in range(alg.rank):
    row = []
    for j in range(alg.rank):
        blk = xy.block(i, j)
        row.append("%6.1f" % blk[0] if blk.size else "     .")
    print("  " + " ".join(row))
print("trace pairing with the first idempotent: %g"
      % alg.inner(xy, alg.unit_i(0)))

# ----------------------------------------------------------------------
# Membership in the cone K = {t t* : t triangular, nonnegative pivots}
# is decided by running the factorization; the dual cone K* uses t* t.
# A failure comes with a concrete witness (negative pivot or a
# separating direction).

fx = factorize_K(x)
fy = factorize_Kstar(y)
print("\nx in K:  %s/%s pivots=%s" % (fx.member, fx.status,
                                      np.round(fx.diagonal, 6)))
print("y in K*: %s/%s pivots=%s" % (fy.member, fy.status,
                                    np.round(fy.diagonal, 6)))

z = alg.from_natural([1.0, 3.0, 1.0, 0.0, 1.0])
fz = factorize_K(z)
cert = fz.certificate or {}
print("z in K:  %s/%s witness kind=%s, pairing=%.4f"
      % (fz.member, fz.status, cert.get("kind"), cert.get("inner", np.nan)))
