"""Solvers for complementarity problems over the cone pair (K, K*).

A problem asks for x in K with y = F(x) + q in K* and <x, y> = 0.  The
natural residual Phi(x) = x - P_K(x - F(x) - q) vanishes exactly at the
solutions, so the solvers drive |Phi| to zero: a damped fixed point
iteration x <- P_K(x - gamma (F(x) + q)) and a semismooth Newton method on
Phi with finite difference Jacobians.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .cone_geometry import project
from .talgebra import Element

__all__ = ["LinearMap", "HccpProblem", "Solution", "natural_residual",
           "residual_norm", "solve", "verify_solution", "BUILTIN_MAPS",
           "builtin_map"]


@dataclass
class LinearMap:
    """Linear operator on Hermitian elements, stored on the natural chart."""
    algebra: object
    matrix: np.ndarray

    def __post_init__(self):
        m = self.algebra.dim_herm
        self.matrix = np.asarray(self.matrix, dtype=float)
        if self.matrix.shape != (m, m):
            raise ValueError("expected a %d x %d matrix" % (m, m))

    def apply(self, x):
        return self.algebra.from_natural(self.matrix @ self.algebra.natural(x))

    __call__ = apply

    def iso_matrix(self):
        """The same operator on the isometric chart, where the Euclidean
        norm agrees with the trace norm."""
        L = self.algebra._chol_herm()
        Y = np.linalg.solve(L, self.matrix.T).T   # M L^{-T}
        return L.T @ Y


def _zero_map(alg):
    def f(x):
        return alg.zero()
    return f


def _identity_map(alg):
    def f(x):
        return x
    return f


def _cube_map(alg):
    # componentwise cubic on the natural chart; monotone and unbounded
    def f(x):
        c = alg.natural(x)
        return alg.from_natural(c ** 3)
    return f


BUILTIN_MAPS = {
    "zero": _zero_map,
    "identity": _identity_map,
    "cube": _cube_map,
}


def builtin_map(alg, name):
    try:
        factory = BUILTIN_MAPS[name]
    except KeyError:
        raise ValueError("unknown builtin map %r (have %s)"
                         % (name, ", ".join(sorted(BUILTIN_MAPS)))) from None
    fn = factory(alg)
    fn._tcone_builtin = name   # lets serializers refer to the map by name
    return fn


@dataclass
class HccpProblem:
    algebra: object
    F: object                      # LinearMap or callable Element -> Element
    q: Element
    label: str = ""

    def map(self, x):
        out = self.F(x)
        if not isinstance(out, Element):
            raise TypeError("F must return an algebra element")
        return out

    def value(self, x):
        """y = F(x) + q."""
        return self.map(x) + self.q


@dataclass
class Solution:
    x: Element
    y: Element
    residual: float
    iterations: int
    method: str
    converged: bool
    starts: list = field(default_factory=list)

    def to_dict(self):
        alg = self.x.algebra
        return {
            "x": alg.natural(self.x).tolist(),
            "y": alg.natural(self.y).tolist(),
            "residual": self.residual,
            "iterations": self.iterations,
            "method": self.method,
            "converged": self.converged,
        }


def natural_residual(problem, x, gamma=1.0):
    """Phi_gamma(x) = x - P_K(x - gamma (F(x) + q)) as an element."""
    p = project(x - gamma * problem.value(x)).projection
    return x - p


def residual_norm(problem, x):
    return problem.algebra.norm(natural_residual(problem, x))


def _kappa_estimate(problem, x0, rng):
    if isinstance(problem.F, LinearMap):
        return float(np.linalg.norm(problem.F.iso_matrix(), 2))
    alg = problem.algebra
    h = 1e-4 * (1.0 + alg.norm(x0))
    base = problem.map(x0)
    best = 0.0
    for _ in range(4):
        d = alg.from_natural(rng.normal(size=alg.dim_herm))
        nd = alg.norm(d)
        if nd == 0:
            continue
        fw = problem.map(x0 + (h / nd) * d)
        best = max(best, alg.norm(fw - base) / h)
    return best


def _fixed_point(problem, x, tol, budget, gamma0):
    alg = problem.algebra
    gamma = gamma0
    px = project(x - gamma * problem.value(x)).projection
    merit = alg.norm(x - px)       # |Phi_gamma(x)|, reusing the projection
    iters = 0
    while iters < budget:
        iters += 1
        if merit <= 0.5 * gamma * tol * max(1.0, alg.norm(x)):
            r = residual_norm(problem, x)
            if r <= tol * max(1.0, alg.norm(x)):
                return x, r, iters, True
        pt = project(px - gamma * problem.value(px)).projection
        m_t = alg.norm(px - pt)
        if m_t <= merit * (1.0 + 1e-12) or gamma <= 1e-6:
            x, px, merit = px, pt, m_t
        else:
            gamma = max(0.5 * gamma, 1e-6)
            px = project(x - gamma * problem.value(x)).projection
            merit = alg.norm(x - px)
    return x, residual_norm(problem, x), iters, False


def _newton(problem, x, tol, budget):
    alg = problem.algebra
    L = alg._chol_herm()
    m = alg.dim_herm

    def phi(c):
        xe = alg.from_natural(np.linalg.solve(L.T, c))
        return L.T @ alg.natural(natural_residual(problem, xe))

    c = L.T @ alg.natural(x)
    r = phi(c)
    f = 0.5 * float(r @ r)
    iters = 0
    while iters < budget:
        scale = max(1.0, float(np.linalg.norm(c)))
        if np.sqrt(2.0 * f) <= tol * scale:
            xe = alg.from_natural(np.linalg.solve(L.T, c))
            return xe, float(np.sqrt(2.0 * f)), iters, True
        iters += 1
        h = 1e-6 * scale
        J = np.empty((m, m))
        for j in range(m):
            cp = c.copy()
            cp[j] += h
            J[:, j] = (phi(cp) - r) / h
        step, *_ = np.linalg.lstsq(J, -r, rcond=None)
        alpha = 1.0
        accepted = False
        while alpha >= 2.0 ** -20:
            ct = c + alpha * step
            rt = phi(ct)
            ft = 0.5 * float(rt @ rt)
            if ft <= f * (1.0 - 1e-4 * alpha) or ft < 1e-30:
                c, r, f = ct, rt, ft
                accepted = True
                break
            alpha *= 0.5
        if not accepted:
            break
    xe = alg.from_natural(np.linalg.solve(L.T, c))
    return xe, float(np.sqrt(2.0 * f)), iters, np.sqrt(2.0 * f) <= tol * max(
        1.0, float(np.linalg.norm(c)))


def _solve_single(problem, x0, method, tol, budget_fixed, budget_newton, gamma0):
    alg = problem.algebra
    if method == "fixedpoint":
        x, r, it, ok = _fixed_point(problem, x0, tol, budget_fixed, gamma0)
        return x, r, it, ok, "fixedpoint"
    if method == "newton":
        x, r, it, ok = _newton(problem, x0, tol, budget_newton)
        return x, r, it, ok, "newton"
    if method != "auto":
        raise ValueError("unknown method %r" % method)
    x, r, it, ok = _newton(problem, x0, tol, budget_newton)
    if ok:
        return x, r, it, ok, "newton"
    x2, r2, it2, ok2 = _fixed_point(problem, x0, tol, budget_fixed, gamma0)
    total = it + it2
    if ok2:
        return x2, r2, total, True, "fixedpoint"
    # polish whichever iterate got further
    xb = x2 if r2 < r else x
    x3, r3, it3, ok3 = _newton(problem, xb, tol, budget_newton)
    total += it3
    if r3 <= min(r, r2):
        return x3, r3, total, ok3, "auto"
    if r2 < r:
        return x2, r2, total, False, "auto"
    return x, r, total, False, "auto"


def solve(problem, x0=None, method="auto", tol=1e-8, max_iter_fixed=5000,
          max_iter_newton=200, starts=1, seed=0):
    """Solve the complementarity problem, optionally from multiple starts.

    The first start is x0 (the unit element when omitted); the rest are
    random points of K.  Returns the best run; per start data is kept in
    Solution.starts as (x_natural, residual, converged) triples.
    """
    alg = problem.algebra
    rng = np.random.default_rng(seed)
    if x0 is None:
        x0 = alg.unit()
    kappa = _kappa_estimate(problem, x0, rng)
    gamma0 = 1.0 / (1.0 + kappa)

    inits = [x0]
    for _ in range(max(int(starts) - 1, 0)):
        c = np.zeros(alg.dim)
        for (i, j) in alg.blocks:
            if i > j:
                continue
            sl = alg.slice(i, j)
            if i == j:
                c[sl] = 0.3 + abs(rng.normal())
            else:
                c[sl] = rng.normal(size=sl.stop - sl.start)
        t = Element(alg, c)
        inits.append(alg.mul(t, alg.star(t)))

    best = None
    runs = []
    for x_init in inits:
        x, r, it, ok, meth = _solve_single(problem, x_init, method, tol,
                                           max_iter_fixed, max_iter_newton,
                                           gamma0)
        runs.append((alg.natural(x), float(r), bool(ok)))
        if best is None or (ok and not best[3]) or \
                (ok == best[3] and r < best[1]):
            best = (x, r, it, ok, meth)
    x, r, it, ok, meth = best
    return Solution(x, problem.value(x), float(r), it, meth, bool(ok), runs)


def verify_solution(problem, x, tol=1e-6):
    """Check x against the six complementarity conditions for (x, F(x)+q)."""
    from .cone_geometry import complementarity_report
    rep = complementarity_report(x, problem.value(x), tol=tol)
    return rep.all_hold, rep
