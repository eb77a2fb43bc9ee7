"""Command line interface.

Subcommands: axioms, project, solve, verify, probe, bound, gen, bench.
Exit status is 0 on success, 1 when the mathematics fails (axiom
violation, non convergence, refuted property, bound violation), and 2 on
usage or input errors.  Flag defaults honor the environment variables
TCONE_TOL, TCONE_SEED, TCONE_SAMPLES, TCONE_METHOD, TCONE_STARTS and
TCONE_FORMAT.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys
import time

import numpy as np

from .cone_geometry import ProjectionError, project
from .error_bound import check_bound
from .hccp_solver import solve, verify_solution
from .instances_io import (PROBLEM_CLASSES, build_corpus, canonical_json,
                           load_algebra, load_bundle, load_json, load_problem,
                           random_problem)
from .properties import (implication_audit, probe_P, probe_R0,
                         probe_monotone, probe_square_in_sum, probe_trace_P)
from .talgebra import verify_axioms

_BENCH_ALGEBRAS = (("orthant4", "orthant:4"),
                   ("psd3", "psd:3"),
                   ("vinberg5", "vinberg5"))


def _env(name, default, cast):
    raw = os.environ.get("TCONE_" + name)
    if raw is None:
        return default
    try:
        return cast(raw)
    except ValueError:
        raise SystemExit("invalid TCONE_%s=%r" % (name, raw))


def build_parser():
    p = argparse.ArgumentParser(
        prog="tcone",
        description="homogeneous cone complementarity toolkit")
    sub = p.add_subparsers(dest="command", required=True)

    fmt = dict(choices=("text", "json"),
               default=_env("FORMAT", "text", str))
    tol = lambda d: dict(type=float, default=_env("TOL", d, float))
    seed = dict(type=int, default=_env("SEED", 0, int))
    samples = lambda d: dict(type=int, default=_env("SAMPLES", d, int))

    q = sub.add_parser("axioms", help="check the algebra axioms")
    q.add_argument("algebra", help="builtin ref (orthant:4, psd:3, "
                                   "vinberg5) or algebra JSON path")
    q.add_argument("--tol", **tol(0.0))
    q.add_argument("--format", **fmt)

    q = sub.add_parser("project", help="project a point onto the cone")
    q.add_argument("algebra")
    q.add_argument("--coords", required=True,
                   help="comma separated natural coordinates")
    q.add_argument("--tol", **tol(1e-8))
    q.add_argument("--format", **fmt)

    q = sub.add_parser("solve", help="solve a problem or bundle file")
    q.add_argument("file")
    q.add_argument("--method",
                   choices=("auto", "fixedpoint", "newton"),
                   default=_env("METHOD", "auto", str))
    q.add_argument("--starts", type=int, default=_env("STARTS", 1, int))
    q.add_argument("--tol", **tol(1e-8))
    q.add_argument("--seed", **seed)
    q.add_argument("--format", **fmt)

    q = sub.add_parser("verify", help="check a stored solution")
    q.add_argument("file")
    q.add_argument("--tol", **tol(1e-6))
    q.add_argument("--format", **fmt)

    q = sub.add_parser("probe", help="probe map properties")
    q.add_argument("file")
    q.add_argument("--property", default="audit",
                   choices=("audit", "monotone", "strict", "strong",
                            "trace_P", "uniform_trace_P", "trace_P0",
                            "P", "P0", "order_P", "order_P0", "R0",
                            "square_in_sum"))
    q.add_argument("--samples", **samples(150))
    q.add_argument("--seed", **seed)
    q.add_argument("--format", **fmt)

    q = sub.add_parser("bound", help="validate the error bound")
    q.add_argument("file")
    q.add_argument("--kappa", type=float, default=None)
    q.add_argument("--alpha", type=float, default=None)
    q.add_argument("--samples", **samples(200))
    q.add_argument("--seed", **seed)
    q.add_argument("--tol", **tol(1e-7))
    q.add_argument("--format", **fmt)

    q = sub.add_parser("gen", help="write the instance corpus")
    q.add_argument("--out", required=True)
    q.add_argument("--per-class", type=int, default=20)
    q.add_argument("--seed", type=int, default=20240815)

    q = sub.add_parser("bench", help="time the solver over fresh instances")
    q.add_argument("--out", default="-", help="CSV path, - for stdout")
    q.add_argument("--per-class", type=int, default=1)
    q.add_argument("--classes", default="strongly_monotone",
                   help="comma separated subset of %s"
                        % (", ".join(PROBLEM_CLASSES)))
    q.add_argument("--seed", **seed)
    return p


def _algebra_arg(spec):
    if os.path.exists(spec):
        return load_algebra(load_json(spec))
    return load_algebra(spec)


def _problem_arg(path):
    doc = load_json(path)
    typ = doc.get("type")
    if typ == "problem":
        return load_problem(doc), None, {}
    if typ == "bundle":
        b = load_bundle(doc)
        return b.problem, b.solution, b.provenance
    raise ValueError("expected a problem or bundle document, got type %r"
                     % typ)


def _emit(args, doc, lines):
    if args.format == "json":
        sys.stdout.write(canonical_json(doc))
    else:
        print("\n".join(lines))


def cmd_axioms(args):
    alg = _algebra_arg(args.algebra)
    rep = verify_axioms(alg, tol=args.tol)
    doc = {"algebra": alg.name or "custom", "passed": rep.passed,
           "checks": {k: {"passed": c.passed, "max_error": c.max_error}
                      for k, c in rep.checks.items()}}
    _emit(args, doc, [rep.summary()])
    return 0 if rep.passed else 1


def cmd_project(args):
    alg = _algebra_arg(args.algebra)
    try:
        coords = np.array([float(t) for t in args.coords.split(",")])
    except ValueError:
        raise ValueError("could not parse --coords") from None
    if coords.size != alg.dim_herm:
        raise ValueError("expected %d coordinates, got %d"
                         % (alg.dim_herm, coords.size))
    x = alg.from_natural(coords)
    try:
        mf = project(x, tol=args.tol)
    except ProjectionError as exc:
        print("projection failed: %s" % exc, file=sys.stderr)
        return 1
    p = mf.projection
    doc = {"projection": alg.natural(p).tolist(),
           "dual_projection": alg.natural(mf.dual_projection).tolist(),
           "residual_moreau": mf.residual_moreau,
           "residual_complementarity": mf.residual_comp,
           "kolmogorov_margin": mf.kolmogorov_margin,
           "method": mf.method}
    _emit(args, doc, [
        "projection      %s" % np.array2string(alg.natural(p), precision=12),
        "dual projection %s" % np.array2string(
            alg.natural(mf.dual_projection), precision=12),
        "residuals       moreau=%.3g comp=%.3g margin=%.3g"
        % (mf.residual_moreau, mf.residual_comp, mf.kolmogorov_margin),
    ])
    return 0


def cmd_solve(args):
    problem, stored, _ = _problem_arg(args.file)
    sol = solve(problem, method=args.method, tol=args.tol,
                starts=args.starts, seed=args.seed)
    doc = sol.to_dict()
    doc["label"] = problem.label
    lines = ["label      %s" % (problem.label or "(none)"),
             "method     %s" % sol.method,
             "iterations %d" % sol.iterations,
             "residual   %.3e" % sol.residual,
             "converged  %s" % sol.converged]
    if stored is not None:
        alg = problem.algebra
        gap = alg.norm(sol.x - stored.x)
        doc["distance_to_stored"] = float(gap)
        lines.append("distance to stored solution %.3e" % gap)
    _emit(args, doc, lines)
    return 0 if sol.converged else 1


def cmd_verify(args):
    problem, stored, _ = _problem_arg(args.file)
    if stored is None:
        raise ValueError("bundle has no stored solution to verify")
    ok, rep = verify_solution(problem, stored.x, tol=args.tol)
    lines = ["%-22s %-4s residual=%.3g"
             % (k, "ok" if c.passed else "FAIL", c.residual)
             for k, c in rep.conditions.items()]
    lines.append("overall: %s" % ("ok" if ok else "FAIL"))
    _emit(args, rep.to_dict(), lines)
    return 0 if ok else 1


def cmd_probe(args):
    problem, _, _ = _problem_arg(args.file)
    alg, F = problem.algebra, problem.F
    if args.property == "audit":
        report = implication_audit(alg, F, samples=args.samples,
                                   seed=args.seed)
        bad = [k for k, v in report.verdicts.items() if not v.holds]
        _emit(args, report.to_dict(), [report.summary()])
        return 0 if report.consistent and not bad else 1
    if args.property in ("monotone", "strict", "strong"):
        v = probe_monotone(alg, F, args.property, samples=args.samples,
                           seed=args.seed)
    elif args.property in ("trace_P", "uniform_trace_P", "trace_P0"):
        v = probe_trace_P(alg, F, args.property, samples=args.samples,
                          seed=args.seed)
    elif args.property in ("P", "P0", "order_P", "order_P0"):
        v = probe_P(alg, F, args.property, samples=args.samples,
                    seed=args.seed)
    elif args.property == "R0":
        v = probe_R0(alg, F, seed=args.seed)
    else:
        v = probe_square_in_sum(alg, samples=args.samples, seed=args.seed)
    line = "%s: %s (%s)%s" % (v.name, "holds" if v.holds else "REFUTED",
                              v.mode, "  " + v.note if v.note else "")
    _emit(args, v.to_dict(), [line])
    return 0 if v.holds else 1


def cmd_bound(args):
    problem, stored, prov = _problem_arg(args.file)
    if stored is None:
        raise ValueError("bundle has no stored solution")
    cert = (prov or {}).get("certified") or {}
    kappa = args.kappa if args.kappa is not None else cert.get("kappa")
    alpha = args.alpha if args.alpha is not None else cert.get("alpha")
    if kappa is None or alpha is None:
        raise ValueError("no certified moduli in the bundle; pass --kappa "
                         "and --alpha")
    rep = check_bound(problem, stored.x, kappa, alpha,
                      samples=args.samples, seed=args.seed, tol=args.tol)
    lines = ["kappa=%.6g alpha=%.6g samples=%d" % (kappa, alpha, rep.samples),
             "lower violations %d (worst slack %.3g)"
             % (rep.lower_violations, rep.worst_lower_slack),
             "upper violations %d (worst slack %.3g)"
             % (rep.upper_violations, rep.worst_upper_slack),
             "overall: %s" % ("ok" if rep.ok else "FAIL")]
    _emit(args, rep.to_dict(), lines)
    return 0 if rep.ok else 1


def cmd_gen(args):
    paths = build_corpus(args.out, per_class=args.per_class,
                         seed0=args.seed)
    print("wrote %d files under %s" % (len(paths), args.out))
    return 0


def cmd_bench(args):
    classes = [c.strip() for c in args.classes.split(",") if c.strip()]
    for c in classes:
        if c not in PROBLEM_CLASSES:
            raise ValueError("unknown class %r" % c)
    rows = []
    for name, ref in _BENCH_ALGEBRAS:
        alg = load_algebra(ref)
        for klass in classes:
            for case in range(args.per_class):
                problem, _, _ = random_problem(alg, klass,
                                               args.seed + case)
                for method in ("fixedpoint", "newton"):
                    t0 = time.perf_counter()
                    sol = solve(problem, method=method, seed=args.seed)
                    wall = time.perf_counter() - t0
                    rows.append([problem.label, name, klass, method,
                                 sol.iterations, repr(sol.residual),
                                 "%.6f" % wall])
    out = sys.stdout if args.out == "-" else open(args.out, "w")
    try:
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["instance", "algebra", "class", "method", "iters",
                         "residual", "wall_time_s"])
        writer.writerows(rows)
    finally:
        if out is not sys.stdout:
            out.close()
    return 0


_COMMANDS = {
    "axioms": cmd_axioms,
    "project": cmd_project,
    "solve": cmd_solve,
    "verify": cmd_verify,
    "probe": cmd_probe,
    "bound": cmd_bound,
    "gen": cmd_gen,
    "bench": cmd_bench,
}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (ValueError, OSError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
