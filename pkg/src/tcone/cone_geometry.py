"""Geometry of the cones K = {t t*} and K* = {t* t} of a T-algebra.

Membership is decided by a generalized Cholesky recurrence on the block
matrix, eliminating one diagonal index at a time.  Projections solve the
square Moreau system

    u u* - v* v = x,   v u = 0,   u, v upper triangular,

by damped Gauss-Newton least squares; u u* is then the projection of x onto
K and v* v the projection of -x onto K*.  Any exact solution of the system
yields the projection pair, because the decomposition of x into a K part and
a K* part with zero inner product is unique.  Results are cross-checked
against the Kolmogorov criterion on sampled cone directions.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import rq
from scipy.optimize import least_squares

from .talgebra import Element

__all__ = [
    "TAU_FACT", "TAU_MOREAU", "TAU_DIAG", "TAU_KOLM", "TAU_SUM",
    "UpperFactor", "MembershipVerdict", "MoreauFactors", "SumVerdict",
    "ProjectionError",
    "factorize_K", "factorize_Kstar",
    "project", "project_K", "project_Kstar", "dist_K", "dist_Kstar",
    "wedge", "vee", "member_sum", "complementarity_report",
    "ComplementarityReport",
]

TAU_FACT = 1e-8     # factorization reconstruction residual
TAU_MOREAU = 1e-8   # Moreau system residuals (relative to max(1, |x|))
TAU_DIAG = 1e-9     # diagonal snap threshold on unit-norm input
TAU_KOLM = 1e-8     # Kolmogorov margin per unit direction
TAU_SUM = 1e-7      # distance threshold for K + K* membership

_KOLM_DIRECTIONS = 64


@dataclass
class UpperFactor:
    """An upper triangular element with nonnegative diagonal."""
    t: Element

    def diagonal(self):
        alg = self.t.algebra
        return np.array([alg.trace_component(self.t, i) for i in range(alg.rank)])

    @property
    def algebra(self):
        return self.t.algebra


@dataclass
class MembershipVerdict:
    member: bool
    status: str                      # interior | boundary | outside
    factor: UpperFactor | None
    residual: float
    diagonal: np.ndarray | None
    certificate: dict | None = None
    tol_diag: float = TAU_DIAG
    tol_fact: float = TAU_FACT

    def to_dict(self):
        d = {
            "member": self.member,
            "status": self.status,
            "residual": self.residual,
            "tol_diag": self.tol_diag,
            "tol_fact": self.tol_fact,
        }
        if self.diagonal is not None:
            d["diagonal"] = [float(v) for v in self.diagonal]
        if self.certificate is not None:
            cert = dict(self.certificate)
            if isinstance(cert.get("direction"), Element):
                cert["direction"] = cert["direction"].coeffs.tolist()
            d["certificate"] = cert
        return d


@dataclass
class MoreauFactors:
    """Solution of the Moreau system at x: u u* = P_K(x), v* v = P_K*(-x)."""
    u: UpperFactor
    v: UpperFactor
    residual_moreau: float
    residual_comp: float
    kolmogorov_margin: float
    iterations: int
    method: str
    # (P_K(x), P_K*(-x)) when a closed form produced them; squaring the
    # factors instead would lose the last ulp
    exact_parts: tuple | None = None

    @property
    def projection(self):
        if self.exact_parts is not None:
            return self.exact_parts[0]
        alg = self.u.t.algebra
        return alg.mul(self.u.t, alg.star(self.u.t))

    @property
    def dual_projection(self):
        if self.exact_parts is not None:
            return self.exact_parts[1]
        alg = self.v.t.algebra
        return alg.mul(alg.star(self.v.t), self.v.t)


@dataclass
class SumVerdict:
    member: bool
    distance: float
    iterations: int
    converged: bool
    certificate: dict | None = None


class ProjectionError(RuntimeError):
    """Raised when the projection solver cannot validate its result."""

    def __init__(self, message, residual_moreau=np.nan, residual_comp=np.nan,
                 kolmogorov_margin=np.nan):
        super().__init__(message)
        self.residual_moreau = residual_moreau
        self.residual_comp = residual_comp
        self.kolmogorov_margin = kolmogorov_margin


# ----------------------------------------------------------------------
# triangular factorization


def _require_hermitian(alg, x, what):
    if not alg.is_hermitian(x, tol=1e-8):
        raise ValueError("%s requires a Hermitian element" % what)


def _factor_core(alg, xhat, dual, tol_diag, clip):
    """Eliminate diagonal indices of the unit-scaled Hermitian xhat.

    Primal order runs from the last index down (x = t t*), dual order from
    the first index up (x = t* t).  Returns (t, pivots, fail_info); in clip
    mode negative pivots are clamped and inconsistent off-diagonal mass with
    a zero pivot is dropped, so fail_info stays None.
    """
    r = alg.rank
    w = xhat.coeffs.copy()
    t = np.zeros(alg.dim)
    pivots = np.zeros(r)
    order = range(r - 1, -1, -1) if not dual else range(r)
    for d in order:
        others = range(d) if not dual else range(d + 1, r)
        pv = alg.rho[d] * w[alg._offset[(d, d)]]
        pivots[d] = pv
        if pv < -tol_diag and not clip:
            return None, pivots, {"kind": "pivot", "index": d, "value": float(pv)}
        pv = max(pv, 0.0)
        col = np.zeros(alg.dim)
        if pv <= tol_diag:
            # zero pivot: the whole row/column must vanish for membership
            off = 0.0
            for i in others:
                blk = (i, d) if not dual else (d, i)
                seg = w[alg.slice(*blk)]
                if seg.size:
                    off = max(off, float(np.abs(seg).max()))
            if off > np.sqrt(max(tol_diag, 1e-300)) and not clip:
                return None, pivots, {"kind": "zero_row", "index": d,
                                      "value": float(off)}
        else:
            beta = np.sqrt(pv) / alg.rho[d]
            col[alg._offset[(d, d)]] = beta
            denom = beta * alg.rho[d]
            for i in others:
                blk = (i, d) if not dual else (d, i)
                sl = alg.slice(*blk)
                col[sl] = w[sl] / denom
        t += col
        ce = Element(alg, col)
        if not dual:
            w -= alg.mul(ce, alg.star(ce)).coeffs
        else:
            w -= alg.mul(alg.star(ce), ce).coeffs
        # the eliminated row and column are exactly zero in theory
        for i in range(r):
            w[alg.slice(i, d)] = 0.0
            w[alg.slice(d, i)] = 0.0
    return Element(alg, t), pivots, None


def _separating_direction(alg, x, dual):
    """Search a few directions of the opposite cone for a negative pairing."""
    cands = [alg.unit()] + [alg.unit_i(i) for i in range(alg.rank)]
    rng = np.random.default_rng(2718)
    for _ in range(24):
        t = _random_upper(alg, rng, 0.0)
        z = alg.mul(alg.star(t), t) if not dual else alg.mul(t, alg.star(t))
        n = alg.norm(z)
        if n > 0:
            cands.append(z * (1.0 / n))
    nx = max(alg.norm(x), 1e-300)
    for z in cands:
        val = alg.inner(x, z)
        if val < -1e-10 * nx * max(alg.norm(z), 1e-300):
            return z, float(val)
    return None, None


def _factorize(x, dual, tol_diag=TAU_DIAG, tol_fact=TAU_FACT):
    alg = x.algebra
    what = "factorize_Kstar" if dual else "factorize_K"
    _require_hermitian(alg, x, what)
    sigma = alg.norm(x)
    if sigma <= 1e-300:
        zf = UpperFactor(alg.zero())
        return MembershipVerdict(True, "boundary", zf, 0.0, np.zeros(alg.rank),
                                 tol_diag=tol_diag, tol_fact=tol_fact)
    xhat = x * (1.0 / sigma)
    t, pivots, fail = _factor_core(alg, xhat, dual, tol_diag, clip=False)
    if fail is None:
        recon = alg.mul(t, alg.star(t)) if not dual else alg.mul(alg.star(t), t)
        resid = alg.norm(recon - xhat)
        if resid <= tol_fact:
            status = "interior" if pivots.min() > tol_diag else "boundary"
            factor = UpperFactor(Element(alg, np.sqrt(sigma) * t.coeffs))
            return MembershipVerdict(True, status, factor, float(resid),
                                     sigma * pivots, tol_diag=tol_diag,
                                     tol_fact=tol_fact)
        fail = {"kind": "residual", "value": float(resid)}
        resid_out = float(resid)
    else:
        resid_out = np.inf
    zdir, val = _separating_direction(alg, x, dual)
    cert = dict(fail)
    if zdir is not None:
        cert = {"kind": "separating", "direction": zdir, "inner": val,
                "failed": fail}
    return MembershipVerdict(False, "outside", None, resid_out,
                             sigma * pivots, certificate=cert,
                             tol_diag=tol_diag, tol_fact=tol_fact)


def factorize_K(x, tol_diag=TAU_DIAG, tol_fact=TAU_FACT):
    """Decide x in K = {t t* : t upper, diag >= 0} and return the factor."""
    return _factorize(x, dual=False, tol_diag=tol_diag, tol_fact=tol_fact)


def factorize_Kstar(x, tol_diag=TAU_DIAG, tol_fact=TAU_FACT):
    """Decide x in K* = {t* t : t upper, diag >= 0} and return the factor."""
    return _factorize(x, dual=True, tol_diag=tol_diag, tol_fact=tol_fact)


def _clip_factor(alg, x, dual):
    t, _, _ = _factor_core(alg, x, dual, TAU_DIAG, clip=True)
    return t


# ----------------------------------------------------------------------
# random cone machinery shared with the instance generators


def _random_upper(alg, rng, diag_bound):
    """Random upper triangular element; diagonals diag_bound + |N(0,1)|."""
    c = np.zeros(alg.dim)
    for (i, j) in alg.blocks:
        if i > j:
            continue
        sl = alg.slice(i, j)
        if i == j:
            c[sl] = diag_bound + np.abs(rng.normal())
        else:
            c[sl] = rng.normal(size=sl.stop - sl.start)
    return Element(alg, c)


def _cone_directions(alg, dual, count=_KOLM_DIRECTIONS, seed=20240809):
    key = ("dirs", dual, count)
    dirs = alg._cache.get(key)
    if dirs is None:
        rng = np.random.default_rng(seed)
        dirs = []
        for i in range(alg.rank):
            dirs.append(alg.unit_i(i))
        e = alg.unit()
        dirs.append(e * (1.0 / alg.norm(e)))
        while len(dirs) < count:
            t = _random_upper(alg, rng, 0.0)
            z = alg.mul(t, alg.star(t)) if not dual else alg.mul(alg.star(t), t)
            n = alg.norm(z)
            if n > 1e-12:
                dirs.append(z * (1.0 / n))
        alg._cache[key] = dirs
    return dirs


def _intersection_directions(alg, count=32, seed=31415):
    """Unit directions lying in K and K* both (always contains e and e_i)."""
    key = ("both_dirs", count)
    dirs = alg._cache.get(key)
    if dirs is None:
        dirs = [alg.unit_i(i) for i in range(alg.rank)]
        e = alg.unit()
        dirs.append(e * (1.0 / alg.norm(e)))
        rng = np.random.default_rng(seed)
        tries = 0
        while len(dirs) < count and tries < 8 * count:
            tries += 1
            t = _random_upper(alg, rng, 0.0)
            z = alg.mul(t, alg.star(t))
            n = alg.norm(z)
            if n < 1e-12:
                continue
            z = z * (1.0 / n)
            if factorize_Kstar(z, tol_diag=1e-7).member:
                dirs.append(z)
        alg._cache[key] = dirs
    return dirs


# ----------------------------------------------------------------------
# Moreau projection


def _chol_Q(alg):
    L = alg._cache.get("chol_Q")
    if L is None:
        Q = alg._Q
        L = np.linalg.cholesky(0.5 * (Q + Q.T))
        alg._cache["chol_Q"] = L
    return L


def _lsq(resid, jac, z0, max_nfev):
    """Exact-Jacobian Levenberg-Marquardt least squares."""
    eps = 2.3e-16
    sol = least_squares(resid, z0, jac=jac, method="lm",
                        ftol=eps, xtol=eps, gtol=eps, max_nfev=max_nfev)
    return sol.x, float(np.linalg.norm(sol.fun)), int(sol.nfev)


def _into_T_plus(alg, t, rows):
    """Flip sign of columns (or rows) whose diagonal is negative; t t*
    and t* t are invariant under these flips."""
    c = t.coeffs.copy()
    for d in range(alg.rank):
        if c[alg._offset[(d, d)]] < 0.0:
            rng = range(d + 1) if not rows else range(d, alg.rank)
            for k in rng:
                blk = (k, d) if not rows else (d, k)
                c[alg.slice(*blk)] *= -1.0
    return Element(alg, c)


def _moreau_residual_ops(alg, xflat):
    LQt = _chol_Q(alg).T
    BT = alg._BT
    S = alg._S
    m = alg.dim_herm

    def unpack(z):
        return BT @ z[:m], BT @ z[m:]

    def resid(z):
        uf, vf = unpack(z)
        u, v = Element(alg, uf), Element(alg, vf)
        su, sv = Element(alg, S @ uf), Element(alg, S @ vf)
        r1 = alg.mul(u, su).coeffs - alg.mul(sv, v).coeffs - xflat
        r2 = alg.mul(v, u).coeffs
        return np.concatenate([LQt @ r1, LQt @ r2])

    def jac(z):
        uf, vf = unpack(z)
        u, v = Element(alg, uf), Element(alg, vf)
        su, sv = Element(alg, S @ uf), Element(alg, S @ vf)
        A1 = LQt @ (alg.rmat(su) + alg.lmat(u) @ S) @ BT
        A2 = -LQt @ (alg.rmat(v) @ S + alg.lmat(sv)) @ BT
        A3 = LQt @ alg.lmat(v) @ BT
        A4 = LQt @ alg.rmat(u) @ BT
        return np.block([[A1, A2], [A3, A4]])

    return resid, jac


def _single_factor_ops(alg, xflat):
    LQt = _chol_Q(alg).T
    BT = alg._BT
    S = alg._S

    def resid(z):
        t = Element(alg, BT @ z)
        st = Element(alg, S @ t.coeffs)
        return LQt @ (alg.mul(t, st).coeffs - xflat)

    def jac(z):
        t = Element(alg, BT @ z)
        st = Element(alg, S @ t.coeffs)
        return LQt @ (alg.rmat(st) + alg.lmat(t) @ S) @ BT

    return resid, jac


def _is_matrix_algebra(alg):
    """Dense real matrix algebra: all blocks scalar, unit structure
    constants and involutions, uniform unit trace weights."""
    r = alg.rank
    if alg.dim != r * r or not np.all(alg.block_dims == 1):
        return False
    if not np.all(alg.rho == 1.0):
        return False
    sc = alg.structure_constants
    if len(sc) != r ** 3:
        return False
    if any(a[0, 0, 0] != 1.0 for a in sc.values()):
        return False
    return all(a[0, 0] == 1.0 for a in alg.involution_maps.values())


def _matrix_moreau(alg, x):
    """Closed-form Moreau factors on a dense matrix algebra.

    Eigenvalue clipping gives the split; RQ and QR turn the two Gram
    square roots into upper triangular factors without disturbing the
    products R R^T and S^T S beyond roundoff."""
    r = alg.rank
    m = np.empty((r, r))
    for i in range(r):
        for j in range(r):
            m[i, j] = x.block(i, j)[0]
    m = 0.5 * (m + m.T)
    w, V = np.linalg.eigh(m)
    R = rq(V * np.sqrt(np.maximum(w, 0.0)), mode="full")[0]
    S = np.linalg.qr((np.sqrt(np.maximum(-w, 0.0)) * V).T, mode="r")
    tri = {"u": R, "v": S}
    out = {}
    for name, t in tri.items():
        out[name] = alg.from_blocks({(i, j): [t[i, j]]
                                     for i in range(r) for j in range(i, r)})
    return out["u"], out["v"]


def _clip_start(alg, target):
    """Stack the clipped factors of target into a Moreau unknown vector,
    with a diagonal bump so no column starts at the zero saddle."""
    u0 = _clip_factor(alg, target, dual=False)
    p0 = alg.mul(u0, alg.star(u0))
    v0 = _clip_factor(alg, p0 - target, dual=True)
    return np.concatenate([alg.triangular(u0), alg.triangular(v0)])


def _pivot_starts(alg, z0, cap=64):
    """Clip-start variants that move one diagonal pivot's mass onto an
    off-diagonal block.

    A least-squares stall can be a wrong pivot pattern: the mass of a row
    (primal factor) or column (dual factor) belongs on a coupling entry
    rather than its pivot, and no descent path connects the two basins.
    Same-block pairs come first since a coupling ties both factors."""
    m = alg.dim_herm
    diag, off = {}, {}
    for k, (i, j, p) in enumerate(alg.tri_index):
        if i == j:
            diag.setdefault(i, []).append(k)
        else:
            off.setdefault((i, j), []).append(k)

    def deviate(t, a, b, src):
        t = t.copy()
        amp = np.linalg.norm(t[diag[src]])
        if amp < 1e-12:
            amp = 1.0
        t[diag[src]] = 0.0
        t[off[(a, b)]] = 0.0
        t[off[(a, b)][0]] = amp
        return t

    u0, v0 = z0[:m], z0[m:]
    blocks = list(off)
    pairs = [(deviate(u0, a, b, a), deviate(v0, a, b, b)) for a, b in blocks]
    for a, b in blocks:
        pairs.append((deviate(u0, a, b, a), v0))
        pairs.append((u0, deviate(v0, a, b, b)))
    for a, b in blocks:
        for c, d in blocks:
            if (a, b) != (c, d):
                pairs.append((deviate(u0, a, b, a), deviate(v0, c, d, d)))
    return [np.concatenate(p) for p in pairs[:cap]]


def _homotopy_solve(alg, xhat, resid, jac, max_nfev):
    """Walk the projection along x + mu e from a strongly shifted, well
    conditioned problem down to mu = 0, warm starting each step."""
    e = alg.unit()
    eT = alg.triangular(e)
    mus = (0.25, 0.05, 0.01, 2e-3, 4e-4, 8e-5, 1.6e-5, 3.2e-6,
           6.4e-7, 1.28e-7, 1e-8, 0.0)
    z = _clip_start(alg, xhat + mus[0] * e) + 0.05 * np.concatenate([eT, eT])
    nfev = 0
    rn = np.inf
    for mu in mus:
        if mu == 0.0:
            rmu, jmu = resid, jac
        else:
            rmu, jmu = _moreau_residual_ops(alg, (xhat + mu * e).coeffs)
        z, rn, nf = _lsq(rmu, jmu, z, max_nfev)
        nfev += nf
    return z, rn, nfev


def project(x, tol=TAU_MOREAU, tol_kolm=TAU_KOLM, max_nfev=400, starts=8):
    """Moreau decomposition of a Hermitian x.

    Returns MoreauFactors (u, v) with u u* = P_K(x), v* v = P_K*(-x),
    x = u u* - v* v and v u = 0, validated against the Kolmogorov criterion
    on sampled cone directions.  Raises ProjectionError when no candidate
    passes validation.
    """
    alg = x.algebra
    _require_hermitian(alg, x, "project")
    m = alg.dim_herm
    sigma = alg.norm(x)
    scale = max(1.0, sigma)
    if sigma <= 1e-300:
        zf = UpperFactor(alg.zero())
        return MoreauFactors(zf, UpperFactor(alg.zero()), 0.0, 0.0, 0.0, 0, "trivial")

    if alg.dim == alg.rank:
        # diagonal algebras split coordinatewise, so clipping is exact
        c = x.coeffs
        if not np.all(np.isfinite(c)):
            raise ProjectionError("projection needs finite coordinates")
        cd = np.array([alg.structure_constants[(i, i, i)][0, 0, 0]
                       for i in range(alg.rank)])
        p = np.maximum(c, 0.0)
        n = np.maximum(-c, 0.0)
        return MoreauFactors(
            UpperFactor(alg.element(np.sqrt(p / cd))),
            UpperFactor(alg.element(np.sqrt(n / cd))),
            0.0, 0.0, 0.0, 0, "diagonal",
            exact_parts=(alg.element(p), alg.element(n)))

    if _is_matrix_algebra(alg):
        u, v = _matrix_moreau(alg, x)
        out = _finalize(alg, x, u, v, 0, "eigh", tol, tol_kolm, scale)
        if out is not None:
            return out
        # validation can reject near-degenerate spectra; fall through

    xhat = x * (1.0 / sigma)

    # exact shortcuts when x already sits in K or -x in K*
    fk = factorize_K(xhat, tol_fact=min(tol, TAU_FACT))
    if fk.member:
        u = Element(alg, np.sqrt(sigma) * fk.factor.t.coeffs)
        out = _finalize(alg, x, u, alg.zero(), 0, "factor", tol, tol_kolm, scale)
        if out is not None:
            return out
    fs = factorize_Kstar(-1.0 * xhat, tol_fact=min(tol, TAU_FACT))
    if fs.member:
        v = Element(alg, np.sqrt(sigma) * fs.factor.t.coeffs)
        out = _finalize(alg, x, alg.zero(), v, 0, "factor", tol, tol_kolm, scale)
        if out is not None:
            return out

    resid, jac = _moreau_residual_ops(alg, xhat.coeffs)
    z0 = _clip_start(alg, xhat)
    r0 = np.linalg.norm(resid(z0))
    if r0 > 1e-13:
        # keep diagonals active so the first step cannot stall at a
        # zero-column saddle
        bump = min(0.3, 0.5 * r0 + 1e-3)
        eT = alg.triangular(alg.unit())
        z0 = z0 + bump * np.concatenate([eT, eT])

    z, rn, nfev = _lsq(resid, jac, z0, max_nfev)
    method = "gauss_newton"

    if rn > 1e-12:
        zh, rh, nf = _homotopy_solve(alg, xhat, resid, jac, max_nfev // 2)
        nfev += nf
        if rh < rn:
            z, rn, method = zh, rh, "homotopy"

    if rn > 1e-12:
        for zc in _pivot_starts(alg, _clip_start(alg, xhat)):
            zp, rp, nf = _lsq(resid, jac, zc, max_nfev // 2)
            nfev += nf
            if rp < rn:
                z, rn, method = zp, rp, "pivot_start"
            if rn <= 1e-12:
                break

    if rn > 1e-12:
        # multi-start factor fit: minimize |t t* - xhat| over t, then polish
        fr, fj = _single_factor_ops(alg, xhat.coeffs)
        best_t, best_val = None, np.inf
        rng = np.random.default_rng(1729)
        cands = [z[:m]]
        for _ in range(max(starts - 1, 0)):
            t = _random_upper(alg, rng, 0.2)
            nt = alg.norm(alg.mul(t, alg.star(t)))
            cands.append(alg.triangular(t * (1.0 / np.sqrt(max(nt, 1e-12)))))
        for c in cands:
            zt, rt, nf = _lsq(fr, fj, c, max_nfev // 2)
            nfev += nf
            if rt < best_val:
                best_val, best_t = rt, zt
        tbest = alg.from_triangular(best_t)
        pbest = alg.mul(tbest, alg.star(tbest))
        ub = _clip_factor(alg, pbest, dual=False)
        vb = _clip_factor(alg, pbest - xhat, dual=True)
        z1 = np.concatenate([alg.triangular(ub), alg.triangular(vb)])
        zm, rm, nf = _lsq(resid, jac, z1, max_nfev)
        nfev += nf
        if rm < rn:
            z, rn, method = zm, rm, "multistart"

    uf = alg.from_triangular(z[:m]) * np.sqrt(sigma)
    vf = alg.from_triangular(z[m:]) * np.sqrt(sigma)
    out = _finalize(alg, x, uf, vf, nfev, method, tol, tol_kolm, scale)
    if out is None:
        raise ProjectionError(
            "projection failed to validate: moreau residual %.3g" % (rn * sigma),
            residual_moreau=rn * sigma)
    return out


def _finalize(alg, x, u, v, iters, method, tol, tol_kolm, scale):
    u = _into_T_plus(alg, u, rows=False)
    v = _into_T_plus(alg, v, rows=True)
    p = alg.mul(u, alg.star(u))
    q = alg.mul(alg.star(v), v)
    res_m = alg.norm(p - q - x)
    res_c = alg.norm(alg.mul(v, u))
    if res_m > tol * scale or res_c > tol * scale:
        return None
    diff = x - p
    margin = abs(alg.inner(p, diff)) / max(1.0, alg.norm(p))
    for z in _cone_directions(alg, dual=False):
        margin = max(margin, alg.inner(z, diff))
    diff2 = -1.0 * x - q
    margin = max(margin, abs(alg.inner(q, diff2)) / max(1.0, alg.norm(q)))
    for z in _cone_directions(alg, dual=True):
        margin = max(margin, alg.inner(z, diff2))
    if margin > tol_kolm * scale:
        return None
    return MoreauFactors(UpperFactor(u), UpperFactor(v), float(res_m),
                         float(res_c), float(margin), iters, method)


def project_K(x, **kw):
    """P_K(x) as an element."""
    return project(x, **kw).projection


def project_Kstar(x, **kw):
    """P_K*(x) as an element (via the Moreau identity P_K*(x) = x + P_K(-x))."""
    return project(-1.0 * x, **kw).dual_projection


def dist_K(x, **kw):
    alg = x.algebra
    return alg.norm(x - project_K(x, **kw))


def dist_Kstar(x, **kw):
    alg = x.algebra
    return alg.norm(x - project_Kstar(x, **kw))


# ----------------------------------------------------------------------
# lattice-like operations


def wedge(x, y, dual=False, **kw):
    """x wedge y = x - P(x - y), projecting onto K (or K* when dual)."""
    if dual:
        return x - project_Kstar(x - y, **kw)
    return x - project_K(x - y, **kw)


def vee(x, y, dual=False, **kw):
    """x vee y = y + P(x - y), projecting onto K (or K* when dual)."""
    if dual:
        return y + project_Kstar(x - y, **kw)
    return y + project_K(x - y, **kw)


# ----------------------------------------------------------------------
# membership in K + K*


def member_sum(z, tol=TAU_SUM, max_iter=10000, use_shortcuts=True):
    """Decide z in K + K* by driving dist(z - a - b) to zero with
    alternating projections (a in K, b in K*).  The dual cone of K + K* is
    the intersection of K* and K, so a sampled direction there with a
    negative pairing refutes membership immediately.
    """
    alg = z.algebra
    _require_hermitian(alg, z, "member_sum")
    nz = alg.norm(z)
    scale = max(1.0, nz)
    if nz <= tol:
        return SumVerdict(True, float(nz), 0, True)

    if use_shortcuts:
        for w in _intersection_directions(alg):
            val = alg.inner(z, w)
            if val < -tol * scale:
                return SumVerdict(False, float(-val / max(alg.norm(w), 1e-300)),
                                  0, True, {"kind": "separating", "direction": w,
                                            "inner": float(val)})

        if factorize_K(z).member or factorize_Kstar(z).member:
            return SumVerdict(True, 0.0, 0, True)

    a = alg.zero()
    b = alg.zero()
    dist = np.inf
    for k in range(1, max_iter + 1):
        a = project_K(z - b)
        b = project_Kstar(z - a)
        d = alg.norm(z - a - b)
        if d <= tol * scale:
            return SumVerdict(True, float(d), k, True)
        if dist - d < 1e-13 * scale:
            return SumVerdict(False, float(d), k, True)
        dist = d
    return SumVerdict(dist <= tol * scale, float(dist), max_iter, False)


# ----------------------------------------------------------------------
# complementarity report


@dataclass
class ConditionCheck:
    residual: float
    passed: bool
    detail: dict = field(default_factory=dict)


@dataclass
class ComplementarityReport:
    conditions: dict
    tol: float

    @property
    def all_hold(self):
        return all(c.passed for c in self.conditions.values())

    @property
    def consistent(self):
        flags = {c.passed for c in self.conditions.values()}
        return len(flags) == 1

    def to_dict(self):
        return {
            "tol": self.tol,
            "all_hold": self.all_hold,
            "consistent": self.consistent,
            "conditions": {k: {"residual": c.residual, "passed": c.passed,
                               "detail": {kk: float(vv) for kk, vv in c.detail.items()}}
                           for k, c in self.conditions.items()},
        }


def complementarity_report(x, y, tol=1e-6):
    """Evaluate the six equivalent complementarity conditions for the pair
    (x, y): vanishing wedge (both orders), cone membership with zero inner
    product, vanishing diagonal components of x y and y x, existence of
    factors u, v with v u = 0, and vanishing lower triangular blocks of x y.
    """
    alg = x.algebra
    _require_hermitian(alg, x, "complementarity_report")
    _require_hermitian(alg, y, "complementarity_report")
    sc1 = max(1.0, alg.norm(x), alg.norm(y))
    sc2 = max(1.0, alg.norm(x) * alg.norm(y))

    mf = project(x - y)
    a_res = alg.norm(x - mf.projection)
    b_res = alg.norm(y - mf.dual_projection)

    dx = dist_K(x)
    dy = dist_Kstar(y)
    ip = abs(alg.inner(x, y))

    xy = alg.mul(x, y)
    yx = alg.mul(y, x)
    diag_xy = max(abs(alg.trace_component(xy, i)) for i in range(alg.rank))
    diag_yx = max(abs(alg.trace_component(yx, i)) for i in range(alg.rank))

    ue = _clip_factor(alg, x * (1.0 / max(alg.norm(x), 1.0)), dual=False)
    ve = _clip_factor(alg, y * (1.0 / max(alg.norm(y), 1.0)), dual=True)
    vu = alg.norm(alg.mul(ve, ue)) * max(alg.norm(x), 1.0) ** 0.5 \
        * max(alg.norm(y), 1.0) ** 0.5

    lower = 0.0
    for (i, j) in alg.blocks:
        if i >= j:
            seg = xy.coeffs[alg.slice(i, j)]
            if seg.size:
                lower = max(lower, float(np.abs(seg).max()))

    conds = {
        "a_wedge_primal": ConditionCheck(float(a_res), a_res <= tol * sc1),
        "b_wedge_dual": ConditionCheck(float(b_res), b_res <= tol * sc1),
        "c_orthogonal_members": ConditionCheck(
            float(max(dx, dy, ip / max(sc2, 1.0))),
            dx <= tol * sc1 and dy <= tol * sc1 and ip <= tol * sc2,
            {"dist_K_x": dx, "dist_Kstar_y": dy, "inner": ip}),
        "d_diagonal_products": ConditionCheck(
            float(max(dx, dy, max(diag_xy, diag_yx) / max(sc2, 1.0))),
            dx <= tol * sc1 and dy <= tol * sc1
            and max(diag_xy, diag_yx) <= tol * sc2,
            {"diag_xy": diag_xy, "diag_yx": diag_yx}),
        "e_factor_orthogonal": ConditionCheck(
            float(max(dx, dy, vu / max(sc2, 1.0) ** 0.5)),
            dx <= tol * sc1 and dy <= tol * sc1 and vu <= tol * sc2,
            {"vu": vu}),
        "f_lower_blocks": ConditionCheck(
            float(max(dx, dy, lower / max(sc2, 1.0))),
            dx <= tol * sc1 and dy <= tol * sc1 and lower <= tol * sc2,
            {"lower_max": lower}),
    }
    return ComplementarityReport(conds, tol)
