"""Deterministic JSON serialization and random instance generation.

Documents carry a format_version and a type tag; loaders reject unknown
fields with the JSON path of the offender, so stale or misspelled files
fail loudly instead of silently dropping data.  Dumps are byte
deterministic: sorted keys, two space indent, shortest float repr, one
trailing newline.  Built-in algebras serialize as references such as
"orthant:4" while custom algebras embed their full structure tables.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass

import numpy as np

from .cone_geometry import project
from .hccp_solver import (BUILTIN_MAPS, HccpProblem, LinearMap, Solution,
                          builtin_map, residual_norm)
from .talgebra import Element, TAlgebra, build_builtin

__all__ = [
    "FORMAT_VERSION", "PROBLEM_CLASSES", "Bundle", "canonical_json",
    "dump_algebra", "load_algebra", "dump_element", "load_element",
    "dump_problem", "load_problem", "dump_bundle", "load_bundle",
    "save_json", "load_json", "random_hermitian", "random_cone_point",
    "random_problem", "build_corpus",
]

FORMAT_VERSION = 1

PROBLEM_CLASSES = ("strongly_monotone", "monotone", "P0_R0_candidate",
                   "skew")


def canonical_json(doc):
    return json.dumps(doc, sort_keys=True, indent=2, allow_nan=False) + "\n"


def save_json(doc, path):
    with open(path, "w") as fh:
        fh.write(canonical_json(doc))


def load_json(path):
    with open(path) as fh:
        return json.load(fh)


# ----------------------------------------------------------------------
# schema helpers


def _expect_object(doc, path):
    if not isinstance(doc, dict):
        raise ValueError("expected an object at %s" % path)


def _check_fields(doc, path, required, optional=()):
    _expect_object(doc, path)
    allowed = set(required) | set(optional)
    for key in doc:
        if key not in allowed:
            raise ValueError("unexpected field at %s.%s" % (path, key))
    for key in required:
        if key not in doc:
            raise ValueError("missing field at %s.%s" % (path, key))


def _check_header(doc, typ, path):
    _check_fields_header(doc, path)
    if doc["format_version"] != FORMAT_VERSION:
        raise ValueError("unsupported format_version %r at %s.format_version"
                         % (doc["format_version"], path))
    if doc["type"] != typ:
        raise ValueError("expected type %r at %s.type, got %r"
                         % (typ, path, doc["type"]))


def _check_fields_header(doc, path):
    _expect_object(doc, path)
    for key in ("format_version", "type"):
        if key not in doc:
            raise ValueError("missing field at %s.%s" % (path, key))


# ----------------------------------------------------------------------
# algebras


def _builtin_from_ref(ref, path):
    if ref == "vinberg5":
        return build_builtin("vinberg5")
    for kind in ("orthant", "psd"):
        prefix = kind + ":"
        if ref.startswith(prefix):
            try:
                n = int(ref[len(prefix):])
            except ValueError:
                raise ValueError("malformed builtin reference %r at %s"
                                 % (ref, path)) from None
            return build_builtin(kind, n)
    raise ValueError("unknown builtin reference %r at %s" % (ref, path))


def dump_algebra(alg):
    if alg.name and (alg.name == "vinberg5"
                     or alg.name.split(":")[0] in ("orthant", "psd")):
        return {"format_version": FORMAT_VERSION, "type": "algebra",
                "builtin": alg.name}
    doc = {
        "format_version": FORMAT_VERSION,
        "type": "algebra",
        "name": alg.name,
        "rho": [float(v) for v in alg.rho],
        "block_dims": alg.block_dims.tolist(),
        "structure_constants": {
            "%d,%d,%d" % key: t.tolist()
            for key, t in sorted(alg.structure_constants.items())},
        "involution_maps": {
            "%d,%d" % key: m.tolist()
            for key, m in sorted(alg.involution_maps.items())},
    }
    return doc


def load_algebra(doc, path="$"):
    if isinstance(doc, str):
        return _builtin_from_ref(doc, path)
    _check_header(doc, "algebra", path)
    if "builtin" in doc:
        _check_fields(doc, path, ("format_version", "type", "builtin"))
        return _builtin_from_ref(doc["builtin"], path + ".builtin")
    _check_fields(doc, path,
                  ("format_version", "type", "block_dims",
                   "structure_constants"),
                  ("name", "rho", "involution_maps"))
    dims = np.asarray(doc["block_dims"], dtype=int)
    sc = {tuple(int(v) for v in key.split(",")): np.asarray(t, dtype=float)
          for key, t in doc["structure_constants"].items()}
    inv = {tuple(int(v) for v in key.split(",")): np.asarray(m, dtype=float)
           for key, m in doc.get("involution_maps", {}).items()}
    return TAlgebra(dims.shape[0], dims, sc, involution_maps=inv or None,
                    rho=doc.get("rho"), name=doc.get("name", ""))


# ----------------------------------------------------------------------
# elements


def dump_element(x):
    return {"format_version": FORMAT_VERSION, "type": "element",
            "algebra": dump_algebra(x.algebra),
            "coords": [float(v) for v in x.algebra.natural(x)]}


def load_element(doc, algebra=None, path="$"):
    _check_header(doc, "element", path)
    _check_fields(doc, path, ("format_version", "type"),
                  ("algebra", "coords", "blocks"))
    if "algebra" in doc:
        algebra = _resolve_algebra(doc["algebra"], algebra,
                                   path + ".algebra")
    elif algebra is None:
        raise ValueError("missing field at %s.algebra" % path)
    if ("coords" in doc) == ("blocks" in doc):
        raise ValueError("element at %s needs exactly one of coords/blocks"
                         % path)
    if "coords" in doc:
        coords = np.asarray(doc["coords"], dtype=float)
        if coords.shape != (algebra.dim_herm,):
            raise ValueError("coords at %s.coords must have length %d"
                             % (path, algebra.dim_herm))
        return algebra.from_natural(coords)
    blocks = {}
    for key, vals in doc["blocks"].items():
        i, j = (int(v) for v in key.split(","))
        blocks[(i, j)] = np.asarray(vals, dtype=float)
    return algebra.from_blocks(blocks)


# ----------------------------------------------------------------------
# problems


def _dump_map(F, alg):
    if isinstance(F, LinearMap):
        return {"kind": "linear",
                "matrix": [[float(v) for v in row] for row in F.matrix]}
    name = getattr(F, "_tcone_builtin", None)
    if name in BUILTIN_MAPS:
        return {"kind": "builtin", "name": name}
    raise ValueError("cannot serialize this map; use a LinearMap or a "
                     "builtin map")


def _load_map(doc, alg, path):
    _check_fields(doc, path, ("kind",), ("matrix", "name"))
    if doc["kind"] == "linear":
        if "matrix" not in doc:
            raise ValueError("missing field at %s.matrix" % path)
        return LinearMap(alg, np.asarray(doc["matrix"], dtype=float))
    if doc["kind"] == "builtin":
        if "name" not in doc:
            raise ValueError("missing field at %s.name" % path)
        return builtin_map(alg, doc["name"])
    raise ValueError("unknown map kind %r at %s.kind" % (doc["kind"], path))


def dump_problem(problem):
    alg = problem.algebra
    return {"format_version": FORMAT_VERSION, "type": "problem",
            "algebra": dump_algebra(alg),
            "F": _dump_map(problem.F, alg),
            "q": [float(v) for v in alg.natural(problem.q)],
            "label": problem.label}


def _resolve_algebra(doc_alg, algebra, path):
    if algebra is None:
        return load_algebra(doc_alg, path)
    want = canonical_json(dump_algebra(algebra))
    have = canonical_json(doc_alg if isinstance(doc_alg, dict)
                          else dump_algebra(load_algebra(doc_alg, path)))
    if want != have:
        raise ValueError("algebra at %s does not match the one supplied"
                         % path)
    return algebra


def load_problem(doc, algebra=None, path="$"):
    _check_header(doc, "problem", path)
    _check_fields(doc, path,
                  ("format_version", "type", "algebra", "F", "q"),
                  ("label",))
    alg = _resolve_algebra(doc["algebra"], algebra, path + ".algebra")
    F = _load_map(doc["F"], alg, path + ".F")
    q = np.asarray(doc["q"], dtype=float)
    if q.shape != (alg.dim_herm,):
        raise ValueError("q at %s.q must have length %d"
                         % (path, alg.dim_herm))
    return HccpProblem(alg, F, alg.from_natural(q),
                       label=doc.get("label", ""))


# ----------------------------------------------------------------------
# bundles


@dataclass
class Bundle:
    problem: HccpProblem
    solution: Solution | None
    provenance: dict


def dump_bundle(problem, solution=None, provenance=None):
    alg = problem.algebra
    doc = {"format_version": FORMAT_VERSION, "type": "bundle",
           "problem": dump_problem(problem), "solution": None,
           "provenance": provenance or {}}
    if solution is not None:
        doc["solution"] = {
            "x": [float(v) for v in alg.natural(solution.x)],
            "y": [float(v) for v in alg.natural(solution.y)],
            "residual": float(solution.residual),
        }
    return doc


def load_bundle(doc, algebra=None, path="$"):
    _check_header(doc, "bundle", path)
    _check_fields(doc, path,
                  ("format_version", "type", "problem"),
                  ("solution", "provenance"))
    problem = load_problem(doc["problem"], algebra, path + ".problem")
    alg = problem.algebra
    sol = None
    sdoc = doc.get("solution")
    if sdoc is not None:
        _check_fields(sdoc, path + ".solution", ("x", "y", "residual"))
        sol = Solution(alg.from_natural(np.asarray(sdoc["x"], dtype=float)),
                       alg.from_natural(np.asarray(sdoc["y"], dtype=float)),
                       float(sdoc["residual"]), 0, "stored", True)
    prov = doc.get("provenance", {})
    _expect_object(prov, path + ".provenance")
    return Bundle(problem, sol, prov)


# ----------------------------------------------------------------------
# random instances


def random_hermitian(alg, rng, scale=1.0):
    return alg.from_natural(scale * rng.normal(size=alg.dim_herm))


def random_cone_point(alg, rng, interior=True, scale=1.0):
    """A point of K from a random triangular factor; interior points keep
    every pivot at least 0.1 away from zero."""
    c = np.zeros(alg.dim)
    for (i, j) in alg.blocks:
        if i > j:
            continue
        sl = alg.slice(i, j)
        if i == j:
            v = abs(rng.normal()) * scale
            c[sl] = v + 0.1 * scale if interior else v
        else:
            c[sl] = 0.5 * scale * rng.normal(size=sl.stop - sl.start)
    t = Element(alg, c)
    return alg.mul(t, alg.star(t))


def _class_matrix(klass, m, rng):
    A = rng.normal(size=(m, m)) / np.sqrt(m)
    S = rng.normal(size=(m, m))
    S = 0.5 * (S - S.T)
    if klass == "strongly_monotone":
        return A.T @ A + rng.uniform(0.3, 1.0) * np.eye(m) + S
    if klass == "monotone":
        return A.T @ A + S
    if klass == "P0_R0_candidate":
        return 0.3 * (A.T @ A) + rng.uniform(1e-3, 1e-2) * np.eye(m) + S
    if klass == "skew":
        return S
    raise ValueError("unknown problem class %r (want one of %s)"
                     % (klass, (PROBLEM_CLASSES,)))


def random_problem(alg, klass, seed):
    """Problem of the requested class with a known constructed solution.

    The solution is planted through the Moreau split of a random Hermitian
    w into x* = P_K(w) and y* = P_K*(-w); choosing q = y* - F(x*) makes
    (x*, y*) complementary for F.  Returns (problem, solution, provenance)
    where provenance records the class, the seed, and the certified moduli
    of the map on the isometric chart.
    """
    rng = np.random.default_rng(seed)
    m = alg.dim_herm
    M_iso = _class_matrix(klass, m, rng)
    L = alg._chol_herm()
    F = LinearMap(alg, np.linalg.solve(L.T, M_iso @ L.T))

    w = random_hermitian(alg, rng, scale=float(rng.uniform(0.5, 2.0)))
    moreau = project(w)
    x_star = moreau.projection
    y_star = moreau.dual_projection
    q = y_star - F.apply(x_star)
    problem = HccpProblem(alg, F, q,
                          label="%s/%s/seed%d" % (alg.name or "custom",
                                                  klass, seed))
    mu = float(np.linalg.eigvalsh(0.5 * (M_iso + M_iso.T))[0])
    kappa = float(np.linalg.norm(M_iso, 2))
    certified = {"mu": mu, "kappa": kappa,
                 "alpha": mu if mu > 0 else None,
                 "r0": True if mu > 0 else None}
    solution = Solution(x_star, y_star, residual_norm(problem, x_star), 0,
                        "constructed", True)
    provenance = {"class": klass, "seed": int(seed), "certified": certified}
    return problem, solution, provenance


# ----------------------------------------------------------------------
# corpus


_CORPUS_ALGEBRAS = (("orthant4", ("orthant", 4)),
                    ("psd3", ("psd", 3)),
                    ("vinberg5", ("vinberg5", None)))

_WORKED_X = (5.0, -2.0, 1.0, -2.0, 5.0)
_WORKED_Y = (1.0, 2.0, 4.0, 2.0, 4.0)


def build_corpus(root, per_class=20, seed0=20240815):
    """Write the instance corpus under root and return the relative paths.

    Layout: algebras/<name>.json, elements/worked_{x,y}.json (the Vinberg
    pair whose product shows the empty block at work), and
    bundles/<algebra>/<class>/case_NN.json with planted solutions.  All
    content is a pure function of (per_class, seed0).
    """
    paths = []

    def emit(rel, doc):
        full = os.path.join(root, rel)
        os.makedirs(os.path.dirname(full), exist_ok=True)
        save_json(doc, full)
        paths.append(rel)

    vin = build_builtin("vinberg5")
    emit("elements/worked_x.json",
         dump_element(vin.from_natural(np.array(_WORKED_X))))
    emit("elements/worked_y.json",
         dump_element(vin.from_natural(np.array(_WORKED_Y))))

    for ai, (name, (kind, n)) in enumerate(_CORPUS_ALGEBRAS):
        alg = build_builtin(kind, n) if n else build_builtin(kind)
        emit("algebras/%s.json" % name, dump_algebra(alg))
        for ci, klass in enumerate(PROBLEM_CLASSES):
            for case in range(per_class):
                seed = seed0 + 1000 * ai + 100 * ci + case
                problem, solution, prov = random_problem(alg, klass, seed)
                doc = dump_bundle(problem, solution, prov)
                emit("bundles/%s/%s/case_%02d.json" % (name, klass, case),
                     doc)

    manifest = {"format_version": FORMAT_VERSION, "type": "manifest",
                "per_class": per_class, "seed0": seed0,
                "files": sorted(paths)}
    emit("manifest.json", manifest)
    return sorted(paths)
