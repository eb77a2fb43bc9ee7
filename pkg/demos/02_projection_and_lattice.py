"""
Projection onto the cone and the induced lattice operations
===========================================================

Every Hermitian x splits as x = u u* - v* v with v u = 0, which gives
the nearest point of K and of K* simultaneously.  On the orthant this
is coordinate clipping, on the matrix algebra eigenvalue clipping, and
on vinberg5 there is no spectral shortcut at all.
"""

import numpy as np

from tcone import build_builtin, project, vee, wedge

rng = np.random.default_rng(7)

# ----------------------------------------------------------------------
# Orthant: the split reproduces clipping exactly, bit for bit.

alg = build_builtin("orthant", 5)
c = rng.normal(size=5) * 3.0
mf = project(alg.from_natural(c))
print("orthant point      ", np.round(c, 4))
print("projection         ", alg.natural(mf.projection))
print("matches clipping exactly:",
      np.array_equal(alg.natural(mf.projection), np.maximum(c, 0.0)))

# ----------------------------------------------------------------------
# Matrix algebra: compare against eigenvalue clipping.

alg = build_builtin("psd", 3)
m = rng.normal(size=(3, 3))
m = m + m.T + 2.0 * np.eye(3)
x = alg.from_blocks({(i, j): [m[i, j]] for i in range(3) for j in range(3)})
mf = project(x)
w, V = np.linalg.eigh(m)
clip = (V * np.maximum(w, 0.0)) @ V.T
p = np.array([[mf.projection.block(i, j)[0] for j in range(3)]
              for i in range(3)])
print("\npsd eigenvalues    ", np.round(w, 4))
print("max |split - eigenclip| = %.3g" % np.abs(p - clip).max())

# ----------------------------------------------------------------------
# vinberg5: only the factorization route exists.  The returned object
# carries both halves of the split and its own validation residuals.

alg = build_builtin("vinberg5")
x = alg.from_natural(rng.normal(size=5) * 2.0)
mf = project(x)
u, v = mf.u.t, mf.v.t
moreau = alg.norm(alg.mul(u, alg.star(u)) - alg.mul(alg.star(v), v) - x)
print("\nvinberg5 split: method=%s  |uu*-v*v-x|=%.3g  |vu|=%.3g"
      % (mf.method, moreau, alg.norm(alg.mul(v, u))))

# ----------------------------------------------------------------------
# The projection induces lattice operations: the floor x ^ y and the
# ceiling x v y agree with min/max on the orthant and satisfy the same
# trace identity <(x^y)(xvy), e_i> = <xy, e_i> on every algebra.

x = alg.from_natural(rng.normal(size=5))
y = alg.from_natural(rng.normal(size=5))
lo = wedge(x, y)
hi = vee(x, y)
worst = max(abs(alg.inner(alg.mul(lo, hi), alg.unit_i(i))
                - alg.inner(alg.mul(x, y), alg.unit_i(i)))
            for i in range(alg.rank))
print("\nlattice trace identity, worst deviation over idempotents: %.3g"
      % worst)
