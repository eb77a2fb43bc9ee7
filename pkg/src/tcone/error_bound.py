"""Global error bounds from the natural residual.

For a solution x* of a complementarity problem whose map is Lipschitz with
constant kappa and uniformly monotone with modulus alpha, the natural
residual Phi(x) = x - P_K(x - F(x) - q) brackets the distance to x*:

    |Phi(x)| / (2 + kappa)  <=  |x - x*|  <=  (1 + kappa) |Phi(x)| / alpha.

The left inequality only uses that Phi is Lipschitz and vanishes at x*,
so it holds for any solution; the right one is where the moduli enter.
check_bound samples a cloud of points around a verified solution and
reports every violation together with the worst slack on each side.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field

import numpy as np

from .hccp_solver import natural_residual, residual_norm

__all__ = ["BoundReport", "bound_interval", "check_bound"]


@dataclass
class BoundReport:
    kappa: float
    alpha: float
    samples: int
    lower_violations: int
    upper_violations: int
    worst_lower_slack: float
    worst_upper_slack: float
    diagonal_warning: bool
    rows: list = field(default_factory=list)

    @property
    def ok(self):
        return self.lower_violations == 0 and self.upper_violations == 0

    def to_dict(self):
        return {
            "kappa": self.kappa,
            "alpha": self.alpha,
            "samples": self.samples,
            "lower_violations": self.lower_violations,
            "upper_violations": self.upper_violations,
            "worst_lower_slack": self.worst_lower_slack,
            "worst_upper_slack": self.worst_upper_slack,
            "diagonal_warning": self.diagonal_warning,
            "ok": self.ok,
        }

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"

    def to_csv(self):
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["sample", "scale", "residual_norm", "distance",
                         "lower_slack", "upper_slack"])
        for row in self.rows:
            writer.writerow([row["sample"], repr(row["scale"]),
                             repr(row["residual_norm"]),
                             repr(row["distance"]),
                             repr(row["lower_slack"]),
                             repr(row["upper_slack"])])
        return buf.getvalue()


def bound_interval(problem, x, kappa, alpha):
    """The interval [lo, hi] that brackets |x - x*| at the point x."""
    r = problem.algebra.norm(natural_residual(problem, x))
    return r / (2.0 + kappa), (1.0 + kappa) * r / alpha


def check_bound(problem, x_star, kappa, alpha, samples=200, seed=0,
                tol=1e-7, verify=True):
    """Sample points around a verified solution and test both inequalities.

    Scales mix tiny perturbations with far-field points so that both the
    local and the global reach of the bound are exercised.  A nonzero
    violation count means the claimed (kappa, alpha) pair is wrong for
    this problem.  The diagonal_warning flag is set on algebras with
    off-diagonal blocks, where a sampled alpha is easier to overestimate.
    """
    alg = problem.algebra
    if kappa < 0 or alpha <= 0:
        raise ValueError("need kappa >= 0 and alpha > 0")
    if verify:
        res = residual_norm(problem, x_star)
        if res > tol * max(1.0, alg.norm(x_star)):
            raise ValueError("x_star does not solve the problem "
                             "(residual %.3g)" % res)

    rng = np.random.default_rng(seed)
    scales = (1e-3, 1e-2, 0.1, 1.0, 100.0)
    m = alg.dim_herm
    lower_bad = upper_bad = 0
    worst_lo = np.inf
    worst_hi = np.inf
    rows = []
    for k in range(samples):
        s = scales[k % len(scales)]
        d = rng.normal(size=m)
        if k % 3 == 1:
            mask = rng.random(m) < 0.5
            d = np.where(mask, d, 0.0)
            if not d.any():
                d[rng.integers(m)] = 1.0
        d /= np.linalg.norm(d)
        x = x_star + alg.from_natural(s * d)
        dist = alg.norm(x - x_star)
        lo, hi = bound_interval(problem, x, kappa, alpha)
        slack = tol * max(1.0, dist)
        lo_slack = dist - lo
        hi_slack = hi - dist
        if lo_slack < -slack:
            lower_bad += 1
        if hi_slack < -slack:
            upper_bad += 1
        worst_lo = min(worst_lo, lo_slack)
        worst_hi = min(worst_hi, hi_slack)
        rows.append({"sample": k, "scale": s,
                     "residual_norm": (2.0 + kappa) * lo,
                     "distance": dist,
                     "lower_slack": lo_slack, "upper_slack": hi_slack})
    return BoundReport(float(kappa), float(alpha), samples, lower_bad,
                       upper_bad, float(worst_lo), float(worst_hi),
                       bool(alg.dim != alg.rank), rows)
