"""
Sampling probes for map properties, checked against matrix oracles
==================================================================

The probes look for counterexamples to monotonicity, trace-P and R0 by
sampling; "holds" means none was found, a refutation is certified by a
concrete witness.  On the orthant the same questions have brute force
matrix answers, which makes the probes testable.
"""

import numpy as np

from tcone import (build_builtin, implication_audit, lcp_zero_unique,
                   p_matrix_minor_test, probe_R0, probe_monotone,
                   probe_trace_P, random_problem)

alg = build_builtin("orthant", 4)
rng = np.random.default_rng(2)

# ----------------------------------------------------------------------
# trace-P versus the principal minor test.  The map is passed as a bare
# callable, so the probe has to sample like it would for a nonlinear map.

A = rng.normal(size=(4, 4))
good = A.T @ A + 0.4 * np.eye(4)
bad = good - 3.0 * np.eye(4)
for label, M in (("P-matrix", good), ("indefinite", bad)):
    F = lambda x, M=M: alg.element(M @ x.coeffs)
    v = probe_trace_P(alg, F, "trace_P", samples=300, seed=1)
    minors = p_matrix_minor_test(M)
    print("%-10s minor test=%-5s probe=%s"
          % (label, minors.is_p_matrix, "holds" if v.holds else "refuted"))

# ----------------------------------------------------------------------
# R0 asks whether x = 0 is the only zero of the complementarity system
# with q = 0.  Plant a complementary ray r >= 0 with M r >= 0 supported
# off r, then check that both the probe and the oracle see it.

r = np.array([1.0, 2.0, 0.0, 0.0])
s = np.array([0.0, 0.0, 1.0, 3.0])
Mr = good + np.outer(s - good @ r, r) / (r @ r)
F = lambda x: alg.element(Mr @ x.coeffs)
v = probe_R0(alg, F, seed=4)
unique, witness = lcp_zero_unique(Mr)
print("\nplanted ray: oracle unique=%s probe=%s"
      % (unique, "holds" if v.holds else "refuted"))
if not v.holds:
    ray = np.asarray(v.witness["ray"], dtype=float)
    print("probe witness ray:", np.round(ray / ray.max(), 4))

# ----------------------------------------------------------------------
# The audit runs every probe on one problem and cross checks the
# implication order (strong => strict => monotone, trace-P => P, ...):
# a stronger property never holds while a weaker one is refuted.

prob, _, _ = random_problem(build_builtin("vinberg5"),
                            "strongly_monotone", seed=12)
report = implication_audit(prob.algebra, prob.F, samples=120, seed=0)
print("\n" + report.summary())
mono = probe_monotone(prob.algebra, prob.F, "strong", samples=120, seed=0)
print("strong monotonicity: %s (%s)" % ("holds" if mono.holds else "refuted",
                                        mono.mode))
