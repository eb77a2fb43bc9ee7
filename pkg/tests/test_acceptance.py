"""End-to-end acceptance gate.

Each test covers one release criterion and prints a single
"ACCEPTANCE nn <name> PASS|FAIL" line.  Tolerances and runtime budgets
are pinned here on purpose: a change that moves any of them is a change
in observable behavior and should have to edit this file.
"""

import time
from pathlib import Path

import numpy as np

from tcone import (
    HccpProblem,
    LinearMap,
    TAlgebra,
    bound_interval,
    build_builtin,
    check_bound,
    factorize_K,
    factorize_Kstar,
    implication_audit,
    lcp_enumerate,
    lcp_zero_unique,
    load_bundle,
    load_json,
    p_matrix_minor_test,
    probe_R0,
    probe_trace_P,
    project,
    random_problem,
    residual_norm,
    solve,
    vee,
    verify_axioms,
    wedge,
)

ROOT = Path(__file__).resolve().parent.parent
CORPUS = ROOT / "corpus"


def _report(num, name, ok, detail=""):
    line = "ACCEPTANCE %02d %-36s %s" % (num, name, "PASS" if ok else "FAIL")
    if detail:
        line += "  [%s]" % detail
    print(line)
    assert ok, line


def _builtins():
    return (build_builtin("orthant", 4), build_builtin("psd", 3),
            build_builtin("vinberg5"))


# ----------------------------------------------------------------------
# 1. worked rank-3 product, exact entries and memberships


def test_01_worked_product_and_membership():
    t0 = time.perf_counter()
    alg = build_builtin("vinberg5")
    x = alg.from_natural([5.0, -2.0, 1.0, -2.0, 5.0])
    y = alg.from_natural([1.0, 2.0, 4.0, 2.0, 4.0])
    xy = alg.mul(x, y)
    want = {(0, 0): -3.0, (0, 1): 2.0, (0, 2): 2.0,
            (1, 0): 0.0, (1, 1): 0.0,
            (2, 0): 8.0, (2, 2): 16.0}
    exact = all(np.array_equal(xy.block(i, j), np.array([v]))
                for (i, j), v in want.items())
    first = alg.inner(xy, alg.unit_i(0))
    members = factorize_K(x).member and factorize_Kstar(y).member
    dt = time.perf_counter() - t0
    _report(1, "worked product and membership",
            exact and first == -3.0 and members and dt < 1.0,
            "<xy,e1>=%g elapsed=%.3fs" % (first, dt))


# ----------------------------------------------------------------------
# 2. axioms hold exactly on the builtins; every mutation is caught


def _mutate_constant(alg, key, value):
    sc = {k: v.copy() for k, v in alg.structure_constants.items()}
    sc[key][0, 0, 0] = value
    return TAlgebra(alg.rank, alg.block_dims, sc,
                    {k: v.copy() for k, v in alg.involution_maps.items()},
                    alg.rho.copy(), name=alg.name + "+mut")


def test_02_axioms_exact_and_mutations_caught():
    t0 = time.perf_counter()
    ok = True
    for n in range(1, 7):
        ok = ok and verify_axioms(build_builtin("orthant", n), tol=0.0).passed
    for n in range(1, 5):
        ok = ok and verify_axioms(build_builtin("psd", n), tol=0.0).passed
    v = build_builtin("vinberg5")
    ok = ok and verify_axioms(v, tol=0.0).passed

    def caught(key, value):
        try:
            return not verify_axioms(_mutate_constant(v, key, value),
                                     tol=0.0).passed
        except ValueError:
            # constructor-level rejection counts as caught
            return True

    keys = sorted(v.structure_constants)
    total = hits = 0
    for key in keys:
        for value in (0.0, 2.0, -1.0):
            total += 1
            hits += caught(key, value)
    rng = np.random.default_rng(42)
    for _ in range(20):
        key = keys[rng.integers(len(keys))]
        value = float(rng.normal()) * 2.0
        if abs(value - 1.0) < 1e-3:
            continue
        total += 1
        hits += caught(key, value)
    dt = time.perf_counter() - t0
    _report(2, "axioms exact, mutations caught",
            ok and hits == total and dt < 10.0,
            "caught %d/%d elapsed=%.2fs" % (hits, total, dt))


# ----------------------------------------------------------------------
# 3. Moreau split on 1000 random points per builtin, vs closed forms


def _psd_matrix(alg, a):
    n = alg.rank
    m = np.empty((n, n))
    for i in range(n):
        for j in range(n):
            m[i, j] = a.block(i, j)[0]
    return m


def test_03_projection_identities_and_oracles():
    t0 = time.perf_counter()
    scales = (0.1, 1.0, 10.0)
    worst = {"moreau": 0.0, "comp": 0.0, "vu": 0.0, "psd": 0.0}
    orthant_exact = True
    for alg in _builtins():
        rng = np.random.default_rng(31)
        for k in range(1000):
            c = rng.normal(size=alg.dim_herm) * scales[k % 3]
            x = alg.from_natural(c)
            f = project(x)
            u, vt = f.u.t, f.v.t
            uu = alg.mul(u, alg.star(u))
            vv = alg.mul(alg.star(vt), vt)
            worst["moreau"] = max(worst["moreau"], alg.norm(uu - vv - x))
            worst["comp"] = max(worst["comp"], abs(alg.inner(uu, vv)))
            worst["vu"] = max(worst["vu"], alg.norm(alg.mul(vt, u)))
            if alg.name == "orthant:4":
                orthant_exact = orthant_exact and np.array_equal(
                    f.projection.coeffs, np.maximum(c, 0.0))
            elif alg.name == "psd:3":
                m = _psd_matrix(alg, x)
                w, V = np.linalg.eigh(0.5 * (m + m.T))
                clip = V @ np.diag(np.maximum(w, 0.0)) @ V.T
                dev = np.linalg.norm(_psd_matrix(alg, f.projection) - clip)
                worst["psd"] = max(worst["psd"], dev)
    dt = time.perf_counter() - t0
    ok = (worst["moreau"] <= 1e-6 and worst["comp"] <= 1e-6
          and worst["vu"] <= 1e-6 and worst["psd"] <= 1e-6
          and orthant_exact and dt < 300.0)
    _report(3, "projection splits and oracles", ok,
            "moreau=%.2g comp=%.2g vu=%.2g psd=%.2g orthant_exact=%s %.1fs"
            % (worst["moreau"], worst["comp"], worst["vu"], worst["psd"],
               orthant_exact, dt))


# ----------------------------------------------------------------------
# 4. wedge/vee preserve the componentwise product trace


def test_04_wedge_vee_product_identity():
    worst = 0.0
    for alg in _builtins():
        rng = np.random.default_rng(47)
        for _ in range(1000):
            x = alg.from_natural(rng.normal(size=alg.dim_herm))
            y = alg.from_natural(rng.normal(size=alg.dim_herm))
            p = project(x - y).projection
            lo, hi = x - p, y + p
            a = alg.mul(lo, hi)
            b = alg.mul(x, y)
            for i in range(alg.rank):
                worst = max(worst, abs(alg.inner(a - b, alg.unit_i(i))))
    _report(4, "wedge/vee product identity", worst <= 1e-6,
            "worst=%.2g" % worst)


# ----------------------------------------------------------------------
# 5. boundary points with a dead factor row; off-diagonal rejection


def _upper_with_zero_row(alg, rng, row):
    blocks = {}
    for i in range(alg.rank):
        for j in range(i, alg.rank):
            d = int(alg.block_dims[i][j])
            if d and i != row:
                blocks[(i, j)] = rng.normal(size=d)
    return alg.from_blocks(blocks)


def test_05_boundary_row_vanishing():
    worst = 0.0
    rejected = True
    for alg in _builtins():
        rng = np.random.default_rng(59)
        for k in range(100):
            row = k % alg.rank
            t = _upper_with_zero_row(alg, rng, row)
            x = alg.mul(t, alg.star(t))
            scale = max(1.0, alg.norm(x))
            fk = factorize_K(x)
            assert fk.member and alg.trace_component(x, row) == 0.0
            for j in range(alg.rank):
                if int(alg.block_dims[row][j]):
                    worst = max(worst,
                                np.abs(x.block(row, j)).max() / scale,
                                np.abs(x.block(j, row)).max() / scale)
                if j >= row and int(alg.block_dims[row][j]):
                    rec = np.abs(fk.factor.t.block(row, j)).max() / scale
                    worst = max(worst, rec)
        offpairs = [(i, j) for i in range(alg.rank)
                    for j in range(i + 1, alg.rank)
                    if int(alg.block_dims[i][j])]
        for k, (i, j) in enumerate(offpairs * 10):
            a = rng.normal(size=int(alg.block_dims[i][j]))
            if not np.abs(a).max():
                continue
            z = alg.from_blocks({(i, j): a})
            x = z + z.star()
            rejected = rejected and not factorize_K(x).member \
                and not factorize_Kstar(x).member
    _report(5, "boundary rows vanish, off-diag outside",
            worst <= 1e-8 and rejected,
            "worst=%.2g rejected=%s" % (worst, rejected))


# ----------------------------------------------------------------------
# 6. orthant solves match the complementary-support enumeration


def _p_matrix_instance(i):
    n = 2 + i % 7
    rng = np.random.default_rng(900 + i)
    A = rng.normal(size=(n, n))
    S = rng.normal(size=(n, n))
    M = A.T @ A + 0.5 * np.eye(n) + 0.3 * (S - S.T)
    q = rng.normal(size=n)
    return n, M, q


def test_06_orthant_lcp_matches_enumeration():
    worst = spread = 0.0
    for i in range(50):
        n, M, q = _p_matrix_instance(i)
        assert p_matrix_minor_test(M).is_p_matrix
        alg = build_builtin("orthant", n)
        prob = HccpProblem(alg, LinearMap(alg, M), alg.from_natural(q))
        sol = solve(prob)
        oracle = lcp_enumerate(M, q)
        assert sol.converged and len(oracle) == 1
        worst = max(worst,
                    np.linalg.norm(alg.natural(sol.x) - oracle[0].x))
        if i < 20:
            xs = [alg.natural(solve(prob, starts=3, seed=s).x)
                  for s in (0, 1)]
            spread = max(spread, np.linalg.norm(xs[0] - xs[1]),
                         np.linalg.norm(xs[0] - alg.natural(sol.x)))
    _report(6, "lcp solves match enumeration",
            worst <= 1e-6 and spread <= 1e-6,
            "worst=%.2g multistart=%.2g" % (worst, spread))


# ----------------------------------------------------------------------
# 7. certified monotone + R0 families all solve to tolerance


def test_07_monotone_r0_families_solve():
    failures = 0
    worst = 0.0
    for alg in _builtins():
        for i in range(50):
            prob, _, prov = random_problem(alg, "strongly_monotone",
                                           seed=5000 + i)
            cert = prov["certified"]
            assert cert["mu"] > 0 and cert["r0"] is True
            sol = solve(prob)
            worst = max(worst, sol.residual)
            if not (sol.converged and sol.residual <= 1e-6):
                failures += 1
    _report(7, "monotone+R0 families solve", failures == 0,
            "failures=%d worst_residual=%.2g" % (failures, worst))


# ----------------------------------------------------------------------
# 8. distance bounds from certified moduli, plus the scalar case


def test_08_error_bound_certificates():
    t0 = time.perf_counter()
    alg1 = build_builtin("orthant", 1)
    prob = HccpProblem(alg1, LinearMap(alg1, np.array([[1.0]])),
                       alg1.from_natural([-1.0]))
    lo, hi = bound_interval(prob, alg1.from_natural([2.0]),
                            kappa=1.0, alpha=1.0)
    scalar_ok = lo == 1.0 / 3.0 and hi == 2.0 and lo <= 1.0 <= hi

    alg = build_builtin("orthant", 4)
    bad = 0
    for i in range(20):
        p, sol, prov = random_problem(alg, "strongly_monotone", seed=8000 + i)
        cert = prov["certified"]
        rep = check_bound(p, sol.x, cert["kappa"], cert["alpha"],
                          samples=1000, seed=i, tol=1e-8)
        bad += rep.lower_violations + rep.upper_violations
    dt = time.perf_counter() - t0
    _report(8, "error bounds from certified moduli",
            scalar_ok and bad == 0 and dt < 120.0,
            "scalar=(%.3g,%.3g) violations=%d elapsed=%.1fs"
            % (lo, hi, bad, dt))


# ----------------------------------------------------------------------
# 9. probe verdicts against the brute-force matrix oracles


def _trace_p_matrices(count, seed):
    rng = np.random.default_rng(seed)
    for i in range(count):
        n = 2 + i % 7
        kind = i % 4
        A = rng.normal(size=(n, n))
        if kind == 0:
            M = A
        elif kind == 1:
            M = A.T @ A + 0.3 * np.eye(n)
        elif kind == 2:
            M = (A - A.T) + rng.uniform(0.05, 0.5) * np.eye(n)
        else:
            M = A.copy()
            k = rng.integers(n)
            M[k, k] = -abs(M[k, k]) - 0.1
        yield n, M


def _r0_matrices(count, seed):
    rng = np.random.default_rng(seed)
    for i in range(count):
        n = 2 + i % 7
        kind = i % 4
        A = rng.normal(size=(n, n))
        if kind == 0:
            M = A
        elif kind == 1:
            M = A.T @ A + 0.3 * np.eye(n)
        else:
            # plant a complementary ray r: M r = s, r >= 0, s >= 0, r.s = 0
            k = max(1, n // 2) if kind == 2 else 1
            idx = rng.permutation(n)
            r = np.zeros(n)
            r[idx[:k]] = rng.uniform(0.5, 2.0, size=k)
            s = np.zeros(n)
            s[idx[k:]] = rng.uniform(0.0, 1.0, size=n - k)
            M = A + np.outer(s - A @ r, r) / (r @ r)
        yield n, M


def _wrap(alg, M):
    # a bare callable keeps the probes on their sampling route
    return lambda z: alg.from_natural(M @ alg.natural(z))


def test_09_probe_oracle_agreement():
    algs = {n: build_builtin("orthant", n) for n in range(2, 9)}
    contra = missed = 0
    for n, M in _trace_p_matrices(100, 20240815):
        alg = algs[n]
        v = probe_trace_P(alg, _wrap(alg, M), samples=400, seed=3)
        if p_matrix_minor_test(M).is_p_matrix:
            contra += not v.holds
        else:
            missed += v.holds
    r_contra = r_caught = nonunique = 0
    for n, M in _r0_matrices(100, 20240815):
        alg = algs[n]
        v = probe_R0(alg, _wrap(alg, M), samples=8, seed=5)
        if lcp_zero_unique(M)[0]:
            r_contra += not v.holds
        else:
            nonunique += 1
            r_caught += not v.holds
    ok = (contra == 0 and missed == 0 and r_contra == 0
          and nonunique == 50 and r_caught >= 30)
    _report(9, "probes agree with matrix oracles", ok,
            "traceP miss=%d contra=%d | R0 caught=%d/%d contra=%d"
            % (missed, contra, r_caught, nonunique, r_contra))


# ----------------------------------------------------------------------
# 10. the shipped corpus audits clean under the implication chain


def test_10_corpus_implication_audit():
    files = sorted(CORPUS.glob("bundles/**/*.json"))
    assert len(files) == 240
    bad_resid = inconsistent = refuted = 0
    for f in files:
        b = load_bundle(load_json(f))
        prob, x = b.problem, b.solution.x
        scale = max(1.0, prob.algebra.norm(x))
        if residual_norm(prob, x) > 1e-6 * scale:
            bad_resid += 1
        rep = implication_audit(prob.algebra, prob.F, samples=40, seed=1)
        if not rep.consistent:
            inconsistent += 1
        refuted += sum(not v.holds for v in rep.verdicts.values())
    _report(10, "corpus chain audit consistent",
            bad_resid == 0 and inconsistent == 0,
            "bundles=%d refuted_verdicts=%d inconsistent=%d bad_residuals=%d"
            % (len(files), refuted, inconsistent, bad_resid))
