"""
Distance-to-solution brackets from the natural residual
=======================================================

For a Lipschitz, strongly monotone map the natural residual r(x)
brackets the distance to the unique solution:

    r(x) / (2 + kappa)  <=  |x - x*|  <=  (1 + kappa) r(x) / alpha

with kappa the Lipschitz and alpha the monotonicity modulus.  The
bracket is a stopping criterion you can trust without knowing x*.
"""

import numpy as np

from tcone import (HccpProblem, LinearMap, bound_interval, build_builtin,
                   check_bound, random_problem, residual_norm)

# ----------------------------------------------------------------------
# The scalar case can be followed by hand: F(x) = x - 1 on the half
# line has solution x* = 1, and at x = 2 the residual is 1, so with
# kappa = alpha = 1 the bracket is [1/3, 2] around the true distance 1.

alg = build_builtin("orthant", 1)
prob = HccpProblem(alg, LinearMap(alg, np.array([[1.0]])),
                   alg.from_natural([-1.0]))
lo, hi = bound_interval(prob, alg.from_natural([2.0]), kappa=1.0, alpha=1.0)
print("scalar bracket at x=2: [%.6f, %.6f], true distance 1" % (lo, hi))

# ----------------------------------------------------------------------
# A certified instance: the generator records kappa and alpha in the
# provenance, and check_bound samples points near and far from the
# solution and counts violations of either inequality.

alg = build_builtin("orthant", 6)
prob, sol, prov = random_problem(alg, "strongly_monotone", seed=21)
cert = prov["certified"]
rep = check_bound(prob, sol.x, cert["kappa"], cert["alpha"],
                  samples=500, seed=0)
print("\ncertified kappa=%.4f alpha=%.4f" % (cert["kappa"], cert["alpha"]))
print("sampled %d points: lower violations=%d upper violations=%d"
      % (rep.samples, rep.lower_violations, rep.upper_violations))

# ----------------------------------------------------------------------
# Watching the bracket follow an iteration toward the solution.

x = alg.from_natural(np.ones(6) * 4.0)
print("\nresidual and bracket approaching the solution:")
for frac in (1.0, 0.5, 0.1):
    xt = sol.x + frac * (x - sol.x)
    lo, hi = bound_interval(prob, xt, cert["kappa"], cert["alpha"])
    d = alg.norm(xt - sol.x)
    print("  |x-x*|=%.4e  bracket=[%.4e, %.4e]  residual=%.4e"
          % (d, lo, hi, residual_norm(prob, xt)))
