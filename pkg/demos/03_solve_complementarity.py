"""
Solving cone complementarity problems
=====================================

Find x in K with F(x) in K* and <x, F(x)> = 0.  On the orthant with an
affine map this is the classical linear complementarity problem, so the
solver can be checked against support enumeration.  On vinberg5 no such
oracle exists and the residual itself is the certificate.
"""

import numpy as np

from tcone import (HccpProblem, LinearMap, build_builtin, lcp_enumerate,
                   p_matrix_minor_test, random_problem, solve,
                   verify_solution)

# ----------------------------------------------------------------------
# A P-matrix LCP has a unique solution for every q.  Compare the
# solver's answer with brute force enumeration of the 2^n supports.

n = 5
rng = np.random.default_rng(11)
A = rng.normal(size=(n, n))
M = A.T @ A + 0.5 * np.eye(n) + 0.3 * (A - A.T)
q = rng.normal(size=n)
assert p_matrix_minor_test(M).is_p_matrix

alg = build_builtin("orthant", n)
prob = HccpProblem(alg, LinearMap(alg, M), alg.from_natural(q))
sol = solve(prob)
sols = lcp_enumerate(M, q)
gap = np.abs(alg.natural(sol.x) - sols[0].x).max()
print("lcp: %d enumerated solution(s), solver gap %.3g, method=%s,"
      " iters=%d" % (len(sols), gap, sol.method, sol.iterations))

# ----------------------------------------------------------------------
# A strongly monotone instance on the non self dual cone.  The instance
# generator certifies its monotonicity modulus in the provenance dict.

alg = build_builtin("vinberg5")
prob, _, prov = random_problem(alg, "strongly_monotone", seed=3)
print("\nvinberg5 instance, certified mu=%.4f" % prov["certified"]["mu"])
sol = solve(prob)
ok, rep = verify_solution(prob, sol.x)
print("converged=%s residual=%.3g verified=%s" % (sol.converged,
                                                  sol.residual, ok))
for name, c in rep.conditions.items():
    print("  %-22s %-4s residual=%.3g"
          % (name, "ok" if c.passed else "FAIL", c.residual))

# ----------------------------------------------------------------------
# Both iteration families reach the same point; the projected fixed
# point iteration is cheap per step, the semismooth Newton corrector
# converges in a handful of steps.

for method in ("fixedpoint", "newton"):
    s = solve(prob, method=method)
    print("%-10s iters=%-4d residual=%.3g" % (method, s.iterations,
                                              s.residual))
