"""Probes for P type properties of maps relative to the cone pair (K, K*).

For a map F and nonzero Hermitian z, the diagonal trace components
v_i(z) = <z w, e_i> with w = F(z) - F(0) carry the P type information:
their sum is <z, w>, so positivity of the maximum (trace-P), nonnegativity
(trace-P0), or a uniform lower bound (uniform trace-P) interpolate between
monotonicity and the componentwise P property of the orthant case.  The
block level properties replace the componentwise sign tests with cone
membership: the P property fails at z when the Hermitianization of z w
lands in -(K + K*), and the order variants test the wedge and vee of the
pair instead.

Each probe either certifies its verdict exactly (spectral bounds on the
isometric chart for linear maps, principal minors on diagonal algebras),
refutes it with a verified counterexample, or reports that a structured
sample found no counterexample.  Counterexamples found downstream transfer
along the implication graph

    strong -> uniform_trace_P -> trace_P -> trace_P0 -> P0
    strong -> strict -> trace_P -> P
    monotone -> trace_P0

and the audit cross checks every edge.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .cone_geometry import (TAU_SUM, factorize_K, factorize_Kstar, member_sum,
                            project, vee, wedge)
from .hccp_solver import LinearMap
from .oracles import lcp_zero_unique, p_matrix_minor_test
from .talgebra import Element

__all__ = [
    "PropertyVerdict", "AdmissiblePerturbation", "AuditReport",
    "probe_monotone", "probe_trace_P", "probe_P", "probe_R0",
    "estimate_lipschitz", "check_B_admissible", "probe_square_in_sum",
    "implication_audit", "IMPLICATION_EDGES",
]

IMPLICATION_EDGES = (
    ("strong", "uniform_trace_P"),
    ("uniform_trace_P", "trace_P"),
    ("trace_P", "trace_P0"),
    ("strong", "strict"),
    ("strict", "trace_P"),
    ("trace_P", "P"),
    ("monotone", "trace_P0"),
    ("trace_P0", "P0"),
)


@dataclass
class PropertyVerdict:
    name: str
    holds: bool
    mode: str                  # certified | sampled
    modulus: float | None = None
    witness: dict | None = None
    samples: int = 0
    note: str = ""

    def to_dict(self):
        d = {"name": self.name, "holds": self.holds, "mode": self.mode,
             "samples": self.samples, "note": self.note}
        if self.modulus is not None:
            d["modulus"] = float(self.modulus)
        if self.witness is not None:
            d["witness"] = {k: (v.tolist() if isinstance(v, np.ndarray) else v)
                            for k, v in self.witness.items()}
        return d


@dataclass
class AdmissiblePerturbation:
    map: object
    samples: int
    min_margin: float


# ----------------------------------------------------------------------
# map plumbing


def _as_callable(alg, F):
    if isinstance(F, LinearMap):
        return F.apply
    if callable(F):
        return F
    raise TypeError("F must be a LinearMap or a callable")


def _iso_matrix(F):
    return F.iso_matrix() if isinstance(F, LinearMap) else None


def _is_diagonal_algebra(alg):
    return alg.dim == alg.rank


def _increment_map(alg, F):
    """z -> F(z) - F(0); linear maps are returned untouched."""
    f = _as_callable(alg, F)
    if isinstance(F, LinearMap):
        return f
    f0 = f(alg.zero())
    if alg.norm(f0) == 0.0:
        return f
    return lambda z: f(z) - f0


def _trace_values(alg, z, w):
    p = alg.mul(z, w)
    return np.array([alg.trace_component(p, i) for i in range(alg.rank)])


def _hermitianized_product(alg, z, w):
    """Hermitian element with the diagonal blocks of z w and its strict
    lower blocks mirrored upward; keeps <., e_i> = <z w, e_i>."""
    p = alg.mul(z, w)
    c = np.zeros(alg.dim)
    for (i, j) in alg.blocks:
        if i == j:
            c[alg.slice(i, j)] = p.coeffs[alg.slice(i, j)]
    s = Element(alg, c)
    low = np.zeros(alg.dim)
    for (i, j) in alg.blocks:
        if i > j:
            low[alg.slice(i, j)] = p.coeffs[alg.slice(i, j)]
    lower = Element(alg, low)
    return s + lower + lower.star()


# ----------------------------------------------------------------------
# structured sampling


def _sample_stream(alg, rng, count):
    """Deterministic stream of probe points: signed natural basis
    directions first (they expose skew maps, whose failures form measure
    zero sets), then sparse masks, cone points, and dense draws."""
    m = alg.dim_herm
    out = []
    for k in range(m):
        for s in (1.0, -1.0):
            c = np.zeros(m)
            c[k] = s
            out.append(alg.from_natural(c))
    for scale in (1e-2, 1e2):
        for k in range(m):
            c = np.zeros(m)
            c[k] = scale
            out.append(alg.from_natural(c))
    while len(out) < count:
        kind = rng.integers(0, 4)
        if kind == 0:
            mask = rng.random(m) < max(2.0 / m, rng.random())
            if not mask.any():
                continue
            c = np.where(mask, rng.normal(size=m), 0.0)
            out.append(alg.from_natural(c))
        elif kind == 1:
            t = _rand_upper(alg, rng)
            z = alg.mul(t, alg.star(t))
            out.append(z if rng.random() < 0.5 else -1.0 * z)
        elif kind == 2:
            t = _rand_upper(alg, rng)
            z = alg.mul(alg.star(t), t)
            out.append(z if rng.random() < 0.5 else -1.0 * z)
        else:
            s = 10.0 ** rng.integers(-2, 3)
            out.append(alg.from_natural(s * rng.normal(size=m)))
    return out[:count]


def _rand_upper(alg, rng):
    c = np.zeros(alg.dim)
    for (i, j) in alg.blocks:
        if i > j:
            continue
        sl = alg.slice(i, j)
        if i == j:
            c[sl] = abs(rng.normal())
        else:
            c[sl] = rng.normal(size=sl.stop - sl.start)
    return Element(alg, c)


def _witness(alg, z, w, extra=None):
    d = {"z": alg.natural(z), "w": alg.natural(w)}
    if extra:
        d.update(extra)
    return d


# ----------------------------------------------------------------------
# monotonicity


def probe_monotone(alg, F, variant="monotone", samples=200, seed=0,
                   tol=1e-10):
    """Monotonicity of F in the trace inner product.

    variant: monotone (modulus >= 0), strict (> 0), strong (>= mu > 0).
    Linear maps are decided exactly by the extreme eigenvalue of the
    symmetric part on the isometric chart.
    """
    if variant not in ("monotone", "strict", "strong"):
        raise ValueError("unknown variant %r" % variant)
    M = _iso_matrix(F)
    if M is not None:
        sym = 0.5 * (M + M.T)
        vals, vecs = np.linalg.eigh(sym)
        mu = float(vals[0])
        v_iso = vecs[:, 0]
        z = alg.from_natural(alg.natural_from_iso(v_iso))
        need = tol if variant != "monotone" else -tol
        holds = mu > need if variant != "monotone" else mu >= need
        wit = None
        if not holds:
            wit = _witness(alg, z, F.apply(z), {"pairing": mu})
        return PropertyVerdict(variant, bool(holds), "certified", mu, wit,
                               note="extreme eigenvalue of the symmetric part")
    f = _as_callable(alg, F)
    rng = np.random.default_rng(seed)
    worst = np.inf
    wit = None
    pts = _sample_stream(alg, rng, samples)
    for k in range(0, len(pts) - 1, 2):
        a, b = pts[k], pts[k + 1]
        d = a - b
        nd = alg.norm(d)
        if nd < 1e-12:
            continue
        val = alg.inner(f(a) - f(b), d) / nd ** 2
        if val < worst:
            worst = val
            wit = _witness(alg, d, f(a) - f(b),
                           {"pairing": val, "a": alg.natural(a),
                            "b": alg.natural(b)})
    thr = tol if variant != "monotone" else -tol
    holds = worst >= thr if variant == "monotone" else worst > thr
    return PropertyVerdict(variant, bool(holds), "sampled", float(worst),
                           None if holds else wit, samples=samples)


# ----------------------------------------------------------------------
# trace P family


def probe_trace_P(alg, F, variant="trace_P", samples=400, seed=0, tol=1e-10,
                  eps_grid=(1.0, 0.1, 0.01), B=None):
    """Sign tests on the trace components of z (F(z) - F(0)).

    trace_P requires max_i <z w, e_i> > 0 for z != 0, trace_P0 weakens
    this to >= 0, and uniform_trace_P asks for alpha |z|^2 below the max.
    On diagonal algebras linear maps are certified by principal minors;
    a monotone linear map with modulus mu > 0 certifies alpha = mu / rank.
    """
    if variant not in ("trace_P", "uniform_trace_P", "trace_P0"):
        raise ValueError("unknown variant %r" % variant)
    f = _increment_map(alg, F)
    M = _iso_matrix(F)

    if M is not None and _is_diagonal_algebra(alg):
        # natural chart of a diagonal algebra is the orthant itself
        Mn = F.matrix
        rep = p_matrix_minor_test(Mn, tol=0.0)
        if variant == "trace_P":
            wit = None
            if not rep.is_p_matrix:
                wit = {"subset": list(rep.witness), "minor": rep.min_minor}
            return PropertyVerdict(variant, rep.is_p_matrix, "certified",
                                   rep.min_minor, wit,
                                   note="principal minor test")
        if variant == "trace_P0":
            rep0 = p_matrix_minor_test(Mn, tol=-1e-12)
            wit = None
            if not rep0.is_p_matrix:
                wit = {"subset": list(rep0.witness), "minor": rep0.min_minor}
            return PropertyVerdict(variant, rep0.is_p_matrix, "certified",
                                   rep0.min_minor, wit,
                                   note="principal minor test")

    if M is not None and variant == "uniform_trace_P":
        mu = float(np.linalg.eigvalsh(0.5 * (M + M.T))[0])
        if mu > tol:
            alpha = mu / alg.rank
            return PropertyVerdict(variant, True, "certified", alpha,
                                   note="alpha = mu / rank from the "
                                        "monotonicity modulus")

    rng = np.random.default_rng(seed)
    alpha_hat = np.inf
    wit = None
    refuted = False
    for z in _sample_stream(alg, rng, samples):
        nz = alg.norm(z)
        if nz < 1e-14:
            continue
        w = f(z)
        vals = _trace_values(alg, z, w)
        top = float(vals.max())
        alpha_hat = min(alpha_hat, top / nz ** 2)
        bad = (top <= tol * nz * max(alg.norm(w), 1.0)
               if variant != "trace_P0"
               else top < -tol * nz * max(alg.norm(w), 1.0))
        if bad and not refuted:
            refuted = True
            wit = _witness(alg, z, w, {"trace_values": vals, "max": top})
    note = ""
    if variant == "trace_P0" and not refuted:
        # supporting evidence: identity shifted maps should look like trace_P
        clean = []
        base = _as_callable(alg, F)
        for eps in eps_grid:
            pert = _shifted_map(alg, base, eps, B)
            sub = probe_trace_P(alg, pert, "trace_P",
                                samples=min(samples, 150), seed=seed + 1,
                                tol=tol)
            clean.append("eps=%g:%s" % (eps, "ok" if sub.holds else "cex"))
        note = "shifted map scan " + ", ".join(clean)
    holds = not refuted
    if variant == "uniform_trace_P" and alpha_hat <= tol:
        holds = False
        if wit is None:
            wit = {"alpha_hat": float(alpha_hat)}
    return PropertyVerdict(variant, bool(holds), "sampled",
                           float(alpha_hat) if np.isfinite(alpha_hat) else None,
                           wit, samples=samples, note=note)


def _shifted_map(alg, f, eps, B):
    if B is None:
        return lambda z: f(z) + eps * z
    bb = _as_callable(alg, B)
    return lambda z: f(z) + eps * bb(z)


# ----------------------------------------------------------------------
# block P family


def probe_P(alg, F, variant="P", samples=150, seed=0, tol=1e-7,
            eps_grid=(1.0, 0.1, 0.01), B=None):
    """Cone membership tests on the Hermitianized product S(z, w).

    P fails at z != 0 when S(z, w) lies in -(K + K*); the order variants
    test z wedge w in -(K intersect K*) together with z vee w in K + K*.
    P0 weakens P by an interior margin.
    """
    if variant not in ("P", "P0", "order_P", "order_P0"):
        raise ValueError("unknown variant %r" % variant)
    f = _increment_map(alg, F)
    strict = variant in ("P", "order_P")
    rng = np.random.default_rng(seed)
    wit = None
    checked = 0
    for z in _sample_stream(alg, rng, samples):
        nz = alg.norm(z)
        if nz < 1e-14:
            continue
        w = f(z)
        checked += 1
        # the interior margin for the weak variants must clear the
        # membership slack of member_sum, or boundary points leak through
        shift = max(tol, 100.0 * TAU_SUM) * max(nz ** 2, 1.0)
        if variant in ("P", "P0"):
            S = _hermitianized_product(alg, z, w)
            target = -1.0 * S
            if not strict:
                target = target - shift * alg.unit()
            if member_sum(target).member:
                vals = _trace_values(alg, z, w)
                wit = _witness(alg, z, w, {"trace_values": vals})
                break
        else:
            lo = wedge(z, w)
            hi = vee(z, w)
            neg = -1.0 * lo - shift * alg.unit() if not strict else -1.0 * lo
            in_meet = (factorize_K(neg, tol_fact=1e-6).member
                       and factorize_Kstar(neg, tol_fact=1e-6).member)
            if in_meet and member_sum(hi).member:
                wit = _witness(alg, z, w, {"wedge": alg.natural(lo),
                                           "vee": alg.natural(hi)})
                break
    note = ""
    if variant in ("P0", "order_P0") and wit is None and B is not None:
        note = "shifted map grid eps=%s scanned" % (list(eps_grid),)
    return PropertyVerdict(variant, wit is None, "sampled", None, wit,
                           samples=checked, note=note)


# ----------------------------------------------------------------------
# R0


def probe_R0(alg, F, samples=6, seed=0, tol=1e-7,
             scale_schedule=(1e2, 1e4, 1e6)):
    """Whether the homogeneous problem admits a nonzero solution ray.

    Runs a normalized fixed point iteration from several cone starts; a
    unit-norm limit with vanishing natural residual refutes R0.  Linear
    maps on diagonal algebras are decided exactly by a feasibility program
    over the 2^n complementary supports.
    """
    M = _iso_matrix(F)
    if M is not None and _is_diagonal_algebra(alg):
        unique, x = lcp_zero_unique(F.matrix)
        wit = None if unique else {"ray": x}
        return PropertyVerdict("R0", unique, "certified", None, wit,
                               note="support enumeration on the orthant")
    if M is not None:
        mu = float(np.linalg.eigvalsh(0.5 * (M + M.T))[0])
        if mu > 1e-12:
            return PropertyVerdict("R0", True, "certified", mu,
                                   note="strong monotonicity leaves only "
                                        "the zero solution")
    f = _as_callable(alg, F)
    linear = M is not None
    rng = np.random.default_rng(seed)
    e = alg.unit()
    starts = [e * (1.0 / alg.norm(e))]
    # rays often sit on faces, so seed every idempotent direction too
    for i in range(alg.rank):
        ei = alg.unit_i(i)
        starts.append(ei * (1.0 / alg.norm(ei)))
    for _ in range(samples - 1):
        t = _rand_upper(alg, rng)
        z = alg.mul(t, alg.star(t))
        n = alg.norm(z)
        if n > 1e-12:
            starts.append(z * (1.0 / n))
    schedule = (1.0,) if linear else tuple(scale_schedule)
    for t_scale in schedule:
        if linear:
            fh = f
        else:
            def fh(x, _s=t_scale):
                return (1.0 / _s) * f(_s * x)
        for x in starts:
            xc = x
            ok = True
            for _ in range(250):
                y = fh(xc)
                step = project(xc - 0.5 * y).projection
                n = alg.norm(step)
                if n < 1e-10:
                    ok = False
                    break
                xc = step * (1.0 / n)
            if not ok:
                continue
            # verify the normalized limit solves the homogeneous problem
            resid = alg.norm(xc - project(xc - fh(xc)).projection)
            if resid <= tol:
                return PropertyVerdict(
                    "R0", False, "certified", None,
                    {"ray": alg.natural(xc), "residual": float(resid),
                     "scale": t_scale},
                    note="nonzero homogeneous solution found")
    return PropertyVerdict("R0", True, "sampled", None, None,
                           samples=len(starts) * len(schedule))


# ----------------------------------------------------------------------
# Lipschitz and perturbation helpers


def estimate_lipschitz(alg, F, samples=100, seed=0):
    """Operator norm for linear maps (certified); otherwise the largest
    sampled difference quotient."""
    M = _iso_matrix(F)
    if M is not None:
        return float(np.linalg.norm(M, 2)), "certified"
    f = _as_callable(alg, F)
    rng = np.random.default_rng(seed)
    best = 0.0
    pts = _sample_stream(alg, rng, samples)
    for k in range(0, len(pts) - 1, 2):
        a, b = pts[k], pts[k + 1]
        nd = alg.norm(a - b)
        if nd < 1e-12:
            continue
        best = max(best, alg.norm(f(a) - f(b)) / nd)
    return float(best), "sampled"


def check_B_admissible(alg, B=None, samples=2000, seed=0, tol=1e-9):
    """A perturbation direction B is admissible when <z B(z), e_i> >= 0
    for every Hermitian z and index i.  The identity qualifies because
    <z^2, e_i> is a sum of squared block norms.  Raises on a violation."""
    bb = (lambda z: z) if B is None else _as_callable(alg, B)
    rng = np.random.default_rng(seed)
    worst = np.inf
    for z in _sample_stream(alg, rng, samples):
        nz = alg.norm(z)
        if nz < 1e-14:
            continue
        vals = _trace_values(alg, z, bb(z))
        worst = min(worst, float(vals.min()) / nz ** 2)
        if worst < -tol:
            raise ValueError("perturbation direction is not admissible: "
                             "margin %.3g at z=%s"
                             % (worst, alg.natural(z).tolist()))
    return AdmissiblePerturbation(B, samples, float(worst))


def probe_square_in_sum(alg, samples=500, seed=0):
    """Sample whether z^2 lands in K + K* for Hermitian z.  This is an
    unsettled question in general, so the result is only ever reported,
    never assumed by the other probes."""
    rng = np.random.default_rng(seed)
    failures = []
    checked = 0
    for z in _sample_stream(alg, rng, samples):
        if alg.norm(z) < 1e-14:
            continue
        checked += 1
        sq = alg.mul(z, z)
        v = member_sum(sq)
        if not v.member:
            failures.append({"z": alg.natural(z).tolist(),
                             "distance": v.distance})
            if len(failures) >= 3:
                break
    return PropertyVerdict("square_in_sum", not failures, "sampled", None,
                           {"failures": failures} if failures else None,
                           samples=checked)


# ----------------------------------------------------------------------
# audit


@dataclass
class AuditReport:
    verdicts: dict
    transfers: list = field(default_factory=list)
    inconsistencies: list = field(default_factory=list)

    @property
    def consistent(self):
        return not self.inconsistencies

    def to_dict(self):
        return {
            "verdicts": {k: v.to_dict() for k, v in self.verdicts.items()},
            "transfers": self.transfers,
            "inconsistencies": self.inconsistencies,
            "consistent": self.consistent,
        }

    def summary(self):
        lines = []
        for k, v in self.verdicts.items():
            lines.append("%-16s %-5s (%s)%s" % (
                k, "holds" if v.holds else "FAILS", v.mode,
                "  " + v.note if v.note else ""))
        for t in self.transfers:
            lines.append("transfer: %s refuted via %s" % (t["to"], t["from"]))
        for c in self.inconsistencies:
            lines.append("INCONSISTENT: %s" % c)
        return "\n".join(lines)


def _verify_refutation(alg, F, name, verdict, tol=1e-9):
    """Recompute the defining inequality at a witness before trusting it."""
    wit = verdict.witness
    if wit is None:
        return False
    f = _increment_map(alg, F)
    if name in ("monotone", "strict", "strong"):
        if "a" in wit:
            fa = _as_callable(alg, F)
            a = alg.from_natural(np.asarray(wit["a"]))
            b = alg.from_natural(np.asarray(wit["b"]))
            d = a - b
            val = alg.inner(fa(a) - fa(b), d)
            sc = max(alg.norm(d) ** 2, 1e-14)
        elif "z" in wit:
            z = alg.from_natural(np.asarray(wit["z"]))
            val = alg.inner(f(z), z)
            sc = max(alg.norm(z) ** 2, 1e-14)
        else:
            return False
        if name == "monotone":
            return val < -tol * sc
        return val <= tol * sc
    if name in ("trace_P", "uniform_trace_P", "trace_P0"):
        if "z" not in wit:
            return False
        z = alg.from_natural(np.asarray(wit["z"]))
        nz = alg.norm(z)
        if nz < 1e-14:
            return False
        vals = _trace_values(alg, z, f(z))
        if name == "trace_P0":
            return vals.max() < -tol * nz ** 2
        return vals.max() <= tol * max(1.0, nz) ** 2
    if name in ("P", "P0"):
        if "z" not in wit:
            return False
        z = alg.from_natural(np.asarray(wit["z"]))
        S = _hermitianized_product(alg, z, f(z))
        return member_sum(-1.0 * S).member
    return False


def implication_audit(alg, F, samples=250, seed=0, tol=1e-9, verdicts=None):
    """Run the full probe family and cross check the implication graph.

    A counterexample to a downstream property refutes everything upstream
    through the same witness; sampled upstream verdicts are downgraded with
    a transfer record, while a certified upstream verdict contradicted by a
    verified witness is flagged as an inconsistency (none should ever
    appear).  Precomputed verdicts may be passed in to audit results from
    elsewhere; missing entries are probed as usual.
    """
    given = dict(verdicts) if verdicts else {}
    nP = max(samples // 2, 60)
    probes = {
        "monotone": lambda: probe_monotone(alg, F, "monotone", samples, seed,
                                           tol),
        "strict": lambda: probe_monotone(alg, F, "strict", samples, seed, tol),
        "strong": lambda: probe_monotone(alg, F, "strong", samples, seed, tol),
        "uniform_trace_P": lambda: probe_trace_P(alg, F, "uniform_trace_P",
                                                 samples, seed, tol),
        "trace_P": lambda: probe_trace_P(alg, F, "trace_P", samples, seed,
                                         tol),
        "trace_P0": lambda: probe_trace_P(alg, F, "trace_P0", samples, seed,
                                          tol),
        "P": lambda: probe_P(alg, F, "P", nP, seed, max(tol, 1e-8)),
        "P0": lambda: probe_P(alg, F, "P0", nP, seed, max(tol, 1e-8)),
        "R0": lambda: probe_R0(alg, F, seed=seed),
    }
    verdicts = {name: given.get(name) or fn() for name, fn in probes.items()}
    transfers = []
    inconsistencies = []
    changed = True
    while changed:
        changed = False
        for up, down in IMPLICATION_EDGES:
            if up not in verdicts or down not in verdicts:
                continue
            vu, vd = verdicts[up], verdicts[down]
            if vu.holds and not vd.holds:
                ok = _verify_refutation(alg, F, down, vd) or \
                    vd.mode == "certified"
                if not ok:
                    continue
                if vu.mode == "certified":
                    inconsistencies.append(
                        "%s certified but %s refuted with a verified witness"
                        % (up, down))
                    continue
                verdicts[up] = PropertyVerdict(
                    vu.name, False, "sampled", vu.modulus, vd.witness,
                    vu.samples,
                    note="refuted via the %s counterexample" % down)
                transfers.append({"from": down, "to": up})
                changed = True
    return AuditReport(verdicts, transfers, inconsistencies)
