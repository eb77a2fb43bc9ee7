"""Bi-graded matrix algebras with involution (T-algebras) over the reals.

A T-algebra of rank r is a direct sum of real blocks A[i][j], 0 <= i, j < r,
with a bilinear product A[i][j] x A[j][l] -> A[i][l] (all other block pairs
multiply to zero), an involution exchanging A[i][j] and A[j][i], and
one-dimensional diagonal blocks identified with the reals.  Upper triangular
elements act as generalized Cholesky factors: K = {t t* : t upper, diag >= 0}
is a homogeneous cone, and by Vinberg's classical construction every
homogeneous cone arises this way.

Elements are stored as flat coefficient vectors over a fixed block basis.
The product is precomputed as a dense (dim, dim, dim) tensor and the
involution as a (dim, dim) matrix, so a product costs two small
matrix-vector multiplies regardless of the block pattern.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product as _iproduct

import numpy as np

__all__ = [
    "TAlgebra",
    "TAlgebraSpec",
    "Element",
    "AxiomCheck",
    "AxiomReport",
    "verify_axioms",
    "build_builtin",
    "BUILTIN_NAMES",
]


class TAlgebra:
    """A T-algebra given by block dimensions, structure constants, involution.

    Parameters
    ----------
    rank : int
        Number of diagonal blocks r.
    block_dims : (r, r) array of int
        block_dims[i, j] = dim A[i][j].  Diagonal entries must be 1 and the
        matrix must be symmetric (these are structural prerequisites; the
        remaining axioms are checked by `verify_axioms`, not here).
    structure_constants : dict[(i, j, l) -> ndarray]
        Tensor C with shape (n_ij, n_jl, n_il): the coefficients of
        a_ij * b_jl in the basis of A[i][l].  Missing keys mean the zero map.
    involution_maps : dict[(i, j) -> ndarray], optional
        Matrix of shape (n_ji, n_ij) mapping coefficients of A[i][j] to
        coefficients of A[j][i].  Defaults to identities.
    rho : array of shape (r,), optional
        Scales identifying the basis vector of each A[i][i] with a real
        number: rho_i(c * u_ii) = rho[i] * c.  Defaults to ones.
    name : str
    """

    def __init__(self, rank, block_dims, structure_constants,
                 involution_maps=None, rho=None, name=""):
        self.rank = int(rank)
        self.block_dims = np.asarray(block_dims, dtype=int)
        self.name = name
        if self.block_dims.shape != (self.rank, self.rank):
            raise ValueError("block_dims must be (rank, rank), got %s"
                             % (self.block_dims.shape,))
        if np.any(self.block_dims < 0):
            raise ValueError("block dimensions must be nonnegative")
        if np.any(np.diag(self.block_dims) != 1):
            raise ValueError("diagonal blocks must be one-dimensional")
        if np.any(self.block_dims != self.block_dims.T):
            raise ValueError("block_dims must be symmetric (dim A[i][j] == dim A[j][i])")

        self.rho = np.ones(self.rank) if rho is None else np.asarray(rho, dtype=float)
        if self.rho.shape != (self.rank,) or np.any(self.rho == 0.0):
            raise ValueError("rho must be %d nonzero scales" % self.rank)

        # flat layout: blocks in lexicographic (i, j) order
        self._offset = {}
        pos = 0
        for i in range(self.rank):
            for j in range(self.rank):
                n = self.block_dims[i, j]
                if n > 0:
                    self._offset[(i, j)] = pos
                    pos += n
        self.dim = pos

        self.structure_constants = {}
        for (i, j, l), tensor in structure_constants.items():
            t = np.asarray(tensor, dtype=float)
            want = (self.block_dims[i, j], self.block_dims[j, l], self.block_dims[i, l])
            if 0 in want:
                raise ValueError("structure constant (%d,%d,%d) addresses an empty block"
                                 % (i, j, l))
            if t.shape != want:
                raise ValueError("structure constant (%d,%d,%d) has shape %s, want %s"
                                 % (i, j, l, t.shape, want))
            self.structure_constants[(i, j, l)] = t

        self.involution_maps = {}
        inv_in = involution_maps or {}
        for (i, j) in self._offset:
            m = inv_in.get((i, j))
            if m is None:
                m = np.eye(self.block_dims[j, i], self.block_dims[i, j])
            else:
                m = np.asarray(m, dtype=float)
            if m.shape != (self.block_dims[j, i], self.block_dims[i, j]):
                raise ValueError("involution map (%d,%d) has shape %s, want %s"
                                 % (i, j, m.shape,
                                    (self.block_dims[j, i], self.block_dims[i, j])))
            self.involution_maps[(i, j)] = m

        self._precompute()
        self._cache = {}

    # ------------------------------------------------------------------
    # precomputed dense operators

    def _precompute(self):
        d = self.dim
        P = np.zeros((d, d, d))
        for (i, j, l), t in self.structure_constants.items():
            sa = self.slice(i, j)
            sb = self.slice(j, l)
            sc = self.slice(i, l)
            P[np.ix_(range(sa.start, sa.stop),
                     range(sb.start, sb.stop),
                     range(sc.start, sc.stop))] = t
        self._P = P

        S = np.zeros((d, d))
        for (i, j), m in self.involution_maps.items():
            S[self.slice(j, i), self.slice(i, j)] = m
        self._S = S

        tvec = np.zeros(d)
        for i in range(self.rank):
            tvec[self._offset[(i, i)]] = self.rho[i]
        self._tvec = tvec

        # PT[p, q] = Tr(b_p b_q);  Q[p, q] = <b_p, b_q> = Tr(b_p* b_q)
        self._PT = P @ tvec
        self._Q = S.T @ self._PT

        # Hermitian and triangular coordinate systems, (i, j) with i <= j,
        # ordered j-major so vinberg5 coordinates come out (x1, ..., x5)
        h_cols = []
        self.herm_index = []
        self.tri_index = []
        for j in range(self.rank):
            for i in range(j + 1):
                n = self.block_dims[i, j]
                for p in range(n):
                    self.herm_index.append((i, j, p))
                    self.tri_index.append((i, j, p))
                    col = np.zeros(d)
                    col[self._offset[(i, j)] + p] = 1.0
                    if i != j:
                        col = col + S @ col
                    h_cols.append(col)
        self.dim_herm = len(self.herm_index)
        self._BH = np.array(h_cols).T if h_cols else np.zeros((d, 0))
        t_cols = np.zeros((d, self.dim_herm))
        for k, (i, j, p) in enumerate(self.tri_index):
            t_cols[self._offset[(i, j)] + p, k] = 1.0
        self._BT = t_cols

    def slice(self, i, j):
        """Flat coefficient slice of block (i, j)."""
        off = self._offset.get((i, j))
        if off is None:
            return slice(0, 0)
        return slice(off, off + self.block_dims[i, j])

    @property
    def blocks(self):
        """Nonempty block labels (i, j) in flat storage order."""
        return list(self._offset)

    def _chol_herm(self):
        """Cholesky factor L of the Hermitian coordinate Gram matrix."""
        L = self._cache.get("chol_herm")
        if L is None:
            G = self._BH.T @ self._Q @ self._BH
            try:
                L = np.linalg.cholesky(0.5 * (G + G.T))
            except np.linalg.LinAlgError:
                raise ValueError("trace form is not positive definite on the "
                                 "Hermitian subspace; the algebra violates the "
                                 "positivity axiom") from None
            self._cache["chol_herm"] = L
        return L

    # ------------------------------------------------------------------
    # elements

    def element(self, coeffs):
        c = np.asarray(coeffs, dtype=float)
        if c.shape != (self.dim,):
            raise ValueError("coefficient vector must have length %d" % self.dim)
        return Element(self, c)

    def zero(self):
        return Element(self, np.zeros(self.dim))

    def unit(self):
        """The two-sided unit e = e_0 + ... + e_{r-1}."""
        c = np.zeros(self.dim)
        for i in range(self.rank):
            c[self._offset[(i, i)]] = 1.0 / self.rho[i]
        return Element(self, c)

    def unit_i(self, i):
        """The idempotent e_i spanning A[i][i]."""
        c = np.zeros(self.dim)
        c[self._offset[(i, i)]] = 1.0 / self.rho[i]
        return Element(self, c)

    def from_blocks(self, blocks):
        """Element from a dict {(i, j): coefficient array}."""
        c = np.zeros(self.dim)
        for (i, j), vals in blocks.items():
            vals = np.atleast_1d(np.asarray(vals, dtype=float))
            if vals.shape != (self.block_dims[i, j],):
                raise ValueError("block (%d,%d) expects %d coefficients, got %s"
                                 % (i, j, self.block_dims[i, j], vals.shape))
            c[self.slice(i, j)] = vals
        return Element(self, c)

    def basis_element(self, k):
        c = np.zeros(self.dim)
        c[k] = 1.0
        return Element(self, c)

    def basis_label(self, k):
        """(i, j, p) label of flat coordinate k."""
        for (i, j), off in self._offset.items():
            n = self.block_dims[i, j]
            if off <= k < off + n:
                return (i, j, k - off)
        raise IndexError(k)

    # ------------------------------------------------------------------
    # algebra operations

    def mul(self, a, b):
        self._own(a), self._own(b)
        m = np.tensordot(a.coeffs, self._P, axes=(0, 0))
        return Element(self, b.coeffs @ m)

    def lmat(self, a):
        """Matrix of x -> a x on flat coefficients."""
        return np.tensordot(a.coeffs, self._P, axes=(0, 0)).T

    def rmat(self, a):
        """Matrix of x -> x a on flat coefficients."""
        return np.tensordot(a.coeffs, self._P, axes=(0, 1)).T

    def star(self, a):
        self._own(a)
        return Element(self, self._S @ a.coeffs)

    def trace(self, a):
        self._own(a)
        return float(self._tvec @ a.coeffs)

    def trace_component(self, a, i):
        """rho_i of the diagonal block: <a, e_i> for a valid algebra."""
        self._own(a)
        return float(self.rho[i] * a.coeffs[self._offset[(i, i)]])

    def inner(self, a, b):
        """Trace inner product <a, b> = Tr(a* b)."""
        self._own(a), self._own(b)
        return float(a.coeffs @ self._Q @ b.coeffs)

    def norm(self, a):
        v = self.inner(a, a)
        return float(np.sqrt(max(v, 0.0)))

    def is_hermitian(self, a, tol=1e-10):
        self._own(a)
        r = a.coeffs - self._S @ a.coeffs
        scale = max(1.0, float(np.linalg.norm(a.coeffs)))
        return float(np.linalg.norm(r)) <= tol * scale

    def hermitian_part(self, a):
        return Element(self, 0.5 * (a.coeffs + self._S @ a.coeffs))

    # ------------------------------------------------------------------
    # Hermitian coordinates

    def natural(self, a):
        """Coordinates of a Hermitian element: upper block coefficients,
        ordered (0,0), (0,1), (1,1), (0,2), ..., giving the familiar
        (x1, ..., x5) chart on vinberg5."""
        self._own(a)
        out = np.empty(self.dim_herm)
        for k, (i, j, p) in enumerate(self.herm_index):
            out[k] = a.coeffs[self._offset[(i, j)] + p]
        return out

    def from_natural(self, coords):
        c = np.asarray(coords, dtype=float)
        if c.shape != (self.dim_herm,):
            raise ValueError("expected %d Hermitian coordinates" % self.dim_herm)
        return Element(self, self._BH @ c)

    def iso_from_natural(self, coords):
        """Map natural Hermitian coordinates to an orthonormal chart
        (Euclidean 2-norm there equals the trace norm)."""
        return self._chol_herm().T @ np.asarray(coords, dtype=float)

    def natural_from_iso(self, coords):
        from scipy.linalg import solve_triangular
        return solve_triangular(self._chol_herm().T, np.asarray(coords, dtype=float),
                                lower=False)

    def triangular(self, a):
        """Upper triangular coordinates (coefficients of blocks i <= j)."""
        self._own(a)
        out = np.empty(self.dim_herm)
        for k, (i, j, p) in enumerate(self.tri_index):
            out[k] = a.coeffs[self._offset[(i, j)] + p]
        return out

    def from_triangular(self, coords):
        c = np.asarray(coords, dtype=float)
        if c.shape != (self.dim_herm,):
            raise ValueError("expected %d triangular coordinates" % self.dim_herm)
        return Element(self, self._BT @ c)

    def _own(self, a):
        if not isinstance(a, Element) or a.algebra is not self:
            raise ValueError("element does not belong to this algebra")

    def __repr__(self):
        return "TAlgebra(%r, rank=%d, dim=%d)" % (self.name, self.rank, self.dim)


# Contract alias: the algebra object doubles as its own spec.
TAlgebraSpec = TAlgebra


class Element:
    """A flat coefficient vector tied to its algebra.  Treat as a value."""

    __slots__ = ("algebra", "coeffs")

    def __init__(self, algebra, coeffs):
        self.algebra = algebra
        self.coeffs = np.asarray(coeffs, dtype=float)

    def block(self, i, j):
        return self.coeffs[self.algebra.slice(i, j)].copy()

    def copy(self):
        return Element(self.algebra, self.coeffs.copy())

    def star(self):
        return self.algebra.star(self)

    def norm(self):
        return self.algebra.norm(self)

    def natural(self):
        return self.algebra.natural(self)

    def __add__(self, other):
        self.algebra._own(other)
        return Element(self.algebra, self.coeffs + other.coeffs)

    def __sub__(self, other):
        self.algebra._own(other)
        return Element(self.algebra, self.coeffs - other.coeffs)

    def __neg__(self):
        return Element(self.algebra, -self.coeffs)

    def __mul__(self, s):
        return Element(self.algebra, self.coeffs * float(s))

    __rmul__ = __mul__

    def __matmul__(self, other):
        return self.algebra.mul(self, other)

    def __repr__(self):
        parts = []
        for (i, j) in self.algebra.blocks:
            v = self.coeffs[self.algebra.slice(i, j)]
            if np.any(v != 0.0):
                parts.append("(%d,%d): %s" % (i, j, np.array2string(v, precision=6)))
        return "Element{%s}" % ", ".join(parts) if parts else "Element{0}"


# ----------------------------------------------------------------------
# axiom verification


@dataclass
class AxiomCheck:
    passed: bool
    max_error: float
    witness: object = None
    note: str = ""


@dataclass
class AxiomReport:
    algebra: str
    tol: float
    checks: dict = field(default_factory=dict)

    @property
    def passed(self):
        return all(c.passed for c in self.checks.values())

    def failures(self):
        return {k: c for k, c in self.checks.items() if not c.passed}

    def summary(self):
        lines = []
        for key, c in self.checks.items():
            status = "ok" if c.passed else "FAIL"
            line = "%-16s %-4s  max_err=%.3g" % (key, status, c.max_error)
            if not c.passed and c.witness is not None:
                line += "  witness=%s" % (c.witness,)
            lines.append(line)
        lines.append("overall: %s" % ("ok" if self.passed else "FAIL"))
        return "\n".join(lines)

    def to_dict(self):
        return {
            "algebra": self.algebra,
            "tol": self.tol,
            "passed": self.passed,
            "checks": {
                k: {"passed": c.passed, "max_error": c.max_error,
                    "witness": _jsonable(c.witness), "note": c.note}
                for k, c in self.checks.items()
            },
        }


def _jsonable(x):
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating,)):
        return float(x)
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, tuple):
        return [_jsonable(v) for v in x]
    if isinstance(x, list):
        return [_jsonable(v) for v in x]
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    return x


def _ct(alg, i, j, l):
    t = alg.structure_constants.get((i, j, l))
    if t is None:
        t = np.zeros((alg.block_dims[i, j], alg.block_dims[j, l],
                      alg.block_dims[i, l]))
    return t


def verify_axioms(alg, tol=0.0):
    """Check the seven T-algebra axioms and the involution laws on all basis
    tuples.  With tol=0 every multilinear identity is required to hold
    exactly, which the built-in algebras do (integer structure constants).
    """
    rep = AxiomReport(algebra=alg.name, tol=tol)
    r = alg.rank
    nd = alg.block_dims
    d = alg.dim
    P, S, PT = alg._P, alg._S, alg._PT

    # I: each diagonal block is a copy of the reals under rho_i,
    # so the (i,i,i) constant must equal rho_i and be nonzero.
    worst, wit = 0.0, None
    for i in range(r):
        c = float(_ct(alg, i, i, i)[0, 0, 0])
        err = abs(c - alg.rho[i]) if c != 0.0 else np.inf
        if err > worst:
            worst, wit = err, (i, c, float(alg.rho[i]))
    rep.checks["I"] = AxiomCheck(worst <= tol, worst, None if worst <= tol else wit,
                                 "diagonal blocks represent the reals")

    # II: e_i is a left unit on row i and a right unit on column i.
    worst, wit = 0.0, None
    e = alg.unit()
    L, R = alg.lmat(e), alg.rmat(e)
    for k in range(d):
        el = np.abs(L[:, k] - np.eye(d)[:, k]).max()
        er = np.abs(R[:, k] - np.eye(d)[:, k]).max()
        err = max(el, er)
        if err > worst:
            worst, wit = err, alg.basis_label(k)
    rep.checks["II"] = AxiomCheck(worst <= tol, worst, None if worst <= tol else wit,
                                  "block units act as identities")

    # III: Tr(ab) = Tr(ba) on basis pairs.
    Dm = np.abs(PT - PT.T)
    worst = float(Dm.max())
    wit = None
    if worst > tol:
        p, q = np.unravel_index(np.argmax(Dm), Dm.shape)
        wit = (alg.basis_label(p), alg.basis_label(q))
    rep.checks["III"] = AxiomCheck(worst <= tol, worst, wit, "trace commutes")

    # IV: Tr((ab)c) = Tr(a(bc)) on basis triples.
    T1 = np.tensordot(P, PT, axes=(2, 0))
    T2 = np.einsum("pk,qsk->pqs", PT, P)
    Dm = np.abs(T1 - T2)
    worst = float(Dm.max())
    wit = None
    if worst > tol:
        p, q, s = np.unravel_index(np.argmax(Dm), Dm.shape)
        wit = (alg.basis_label(p), alg.basis_label(q), alg.basis_label(s))
    rep.checks["IV"] = AxiomCheck(worst <= tol, worst, wit, "trace is associative")

    # V: <a, a> = Tr(a* a) must be positive definite.
    Q = alg._Q
    asym = float(np.abs(Q - Q.T).max())
    eigvals, eigvecs = np.linalg.eigh(0.5 * (Q + Q.T))
    mineig = float(eigvals[0])
    ok = asym <= max(tol, 1e-12) and mineig > tol
    wit = None
    if not ok:
        k = int(np.argmax(np.abs(eigvecs[:, 0])))
        wit = {"min_eigenvalue": mineig, "asymmetry": asym,
               "direction_peak": alg.basis_label(k)}
    rep.checks["V"] = AxiomCheck(ok, max(asym, -min(mineig, 0.0)), wit,
                                 "trace form positive definite, min eig %.3g" % mineig)

    # VI: a_ij (b_jk c_kl) = (a_ij b_jk) c_kl for i <= j <= k <= l.
    worst, wit = 0.0, None
    for i, j, k, l in _iproduct(range(r), repeat=4):
        if not (i <= j <= k <= l):
            continue
        if nd[i, j] == 0 or nd[j, k] == 0 or nd[k, l] == 0:
            continue
        lhs = np.einsum("qsm,pmn->pqsn", _ct(alg, j, k, l), _ct(alg, i, j, l))
        rhs = np.einsum("pqm,msn->pqsn", _ct(alg, i, j, k), _ct(alg, i, k, l))
        err = float(np.abs(lhs - rhs).max())
        if err > worst:
            worst, wit = err, (i, j, k, l)
    rep.checks["VI"] = AxiomCheck(worst <= tol, worst, None if worst <= tol else wit,
                                  "upper triple products associate")

    # VII: a_ij (b_jk w_lk*) = (a_ij b_jk) w_lk* for i <= j <= k and l <= k.
    worst, wit = 0.0, None
    for i, j, k, l in _iproduct(range(r), repeat=4):
        if not (i <= j <= k and l <= k):
            continue
        if nd[i, j] == 0 or nd[j, k] == 0 or nd[l, k] == 0:
            continue
        V = alg.involution_maps[(l, k)]        # A[l][k] -> A[k][l]
        bw = np.einsum("qtm,ts->qsm", _ct(alg, j, k, l), V)
        lhs = np.einsum("qsm,pmn->pqsn", bw, _ct(alg, i, j, l))
        rhs = np.einsum("pqm,mtn,ts->pqsn", _ct(alg, i, j, k), _ct(alg, i, k, l), V)
        err = float(np.abs(lhs - rhs).max())
        if err > worst:
            worst, wit = err, (i, j, k, l)
    rep.checks["VII"] = AxiomCheck(worst <= tol, worst, None if worst <= tol else wit,
                                   "products associate against starred factors")

    # involution laws
    worst, wit = 0.0, None
    for (i, j) in alg.blocks:
        m = alg.involution_maps[(j, i)] @ alg.involution_maps[(i, j)]
        err = float(np.abs(m - np.eye(nd[i, j])).max())
        if err > worst:
            worst, wit = err, (i, j)
    rep.checks["inv_involutive"] = AxiomCheck(worst <= tol, worst,
                                              None if worst <= tol else wit,
                                              "star is an involution")

    lhs = np.einsum("mk,pqk->pqm", S, P)
    rhs = np.einsum("iq,jp,ijm->pqm", S, S, P)
    Dm = np.abs(lhs - rhs)
    worst = float(Dm.max())
    wit = None
    if worst > tol:
        p, q, _ = np.unravel_index(np.argmax(Dm), Dm.shape)
        wit = (alg.basis_label(p), alg.basis_label(q))
    rep.checks["inv_antihom"] = AxiomCheck(worst <= tol, worst, wit,
                                           "(ab)* = b* a*")

    rep.checks["inv_blockwise"] = AxiomCheck(True, 0.0, None,
                                             "(a*)_ij = (a_ji)* holds by construction")
    rep.checks["inv_grading"] = AxiomCheck(True, 0.0, None,
                                           "dim A[i][j] = dim A[j][i] enforced at build")
    return rep


# ----------------------------------------------------------------------
# built-in algebras

BUILTIN_NAMES = ("orthant", "psd", "vinberg5")


def build_builtin(kind, n=None):
    """Construct a built-in algebra.

    orthant(n): rank n, no off-diagonal blocks; K is the nonnegative orthant.
    psd(n): full n x n real matrix algebra with transpose; K is the PSD cone.
    vinberg5: rank 3, block (1,2) empty; K is the 5-dimensional Vinberg cone,
    the classical homogeneous cone that is not symmetric (not self-dual).
    """
    if kind == "orthant":
        if n is None or n < 1:
            raise ValueError("orthant requires a positive size")
        dims = np.eye(n, dtype=int)
        np.fill_diagonal(dims, 1)
        sc = {(i, i, i): np.ones((1, 1, 1)) for i in range(n)}
        return TAlgebra(n, dims, sc, name="orthant:%d" % n)
    if kind == "psd":
        if n is None or n < 1:
            raise ValueError("psd requires a positive size")
        dims = np.ones((n, n), dtype=int)
        sc = {(i, j, l): np.ones((1, 1, 1))
              for i, j, l in _iproduct(range(n), repeat=3)}
        return TAlgebra(n, dims, sc, name="psd:%d" % n)
    if kind == "vinberg5":
        if n is not None:
            raise ValueError("vinberg5 takes no size")
        dims = np.array([[1, 1, 1], [1, 1, 0], [1, 0, 1]])
        sc = {}
        for i, j, l in _iproduct(range(3), repeat=3):
            if dims[i, j] and dims[j, l] and dims[i, l]:
                sc[(i, j, l)] = np.ones((1, 1, 1))
        return TAlgebra(3, dims, sc, name="vinberg5")
    raise ValueError("unknown builtin %r (want one of %s)" % (kind, (BUILTIN_NAMES,)))
