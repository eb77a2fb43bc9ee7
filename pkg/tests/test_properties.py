"""Probe and audit behaviour on maps with known properties."""

import numpy as np
import pytest

from tcone.cone_geometry import project_K
from tcone.hccp_solver import LinearMap, builtin_map
from tcone.properties import (IMPLICATION_EDGES, PropertyVerdict,
                              check_B_admissible, estimate_lipschitz,
                              implication_audit, probe_P, probe_R0,
                              probe_monotone, probe_square_in_sum,
                              probe_trace_P)
from tcone.talgebra import build_builtin


def iso_linear(alg, M_iso):
    """LinearMap whose representation on the isometric chart is M_iso."""
    L = alg._chol_herm()
    return LinearMap(alg, np.linalg.solve(L.T, M_iso @ L.T))


def strongly_monotone_map(alg, mu=0.5, seed=5):
    rng = np.random.default_rng(seed)
    m = alg.dim_herm
    A = rng.normal(size=(m, m)) / np.sqrt(m)
    S = rng.normal(size=(m, m))
    return iso_linear(alg, A.T @ A + mu * np.eye(m) + 0.5 * (S - S.T))


def skew_linear(alg, seed=7):
    rng = np.random.default_rng(seed)
    m = alg.dim_herm
    S = rng.normal(size=(m, m))
    return iso_linear(alg, 0.5 * (S - S.T))


@pytest.fixture(scope="module")
def orthant2():
    return build_builtin("orthant", 2)


@pytest.fixture(scope="module")
def orthant3():
    return build_builtin("orthant", 3)


# ----------------------------------------------------------------------
# monotonicity


def test_linear_monotonicity_decided_exactly(orthant2):
    F = LinearMap(orthant2, np.diag([1.0, -1.0]))
    v = probe_monotone(orthant2, F, "monotone")
    assert v.mode == "certified"
    assert not v.holds
    assert abs(v.modulus + 1.0) < 1e-12
    assert np.allclose(np.abs(v.witness["z"]), [0.0, 1.0], atol=1e-12)


def test_strong_monotonicity_certificate(vinberg):
    F = strongly_monotone_map(vinberg)
    for variant in ("monotone", "strict", "strong"):
        v = probe_monotone(vinberg, F, variant)
        assert v.mode == "certified"
        assert v.holds
    assert probe_monotone(vinberg, F, "strong").modulus >= 0.49


def test_nonlinear_monotone_sampled(orthant4):
    f = builtin_map(orthant4, "cube")
    v = probe_monotone(orthant4, f, "monotone", samples=120, seed=1)
    assert v.mode == "sampled"
    assert v.holds
    assert v.modulus >= -1e-10


# ----------------------------------------------------------------------
# trace P family


def test_trace_P_minor_certificate(orthant3, orthant2):
    good = LinearMap(orthant3, [[2.0, -1.0, 0.0],
                                [-1.0, 2.0, -1.0],
                                [0.0, -1.0, 2.0]])
    v = probe_trace_P(orthant3, good, "trace_P")
    assert v.holds and v.mode == "certified" and v.modulus > 0

    bad = LinearMap(orthant2, [[0.0, 1.0], [1.0, 0.0]])
    v = probe_trace_P(orthant2, bad, "trace_P")
    assert not v.holds and v.mode == "certified"
    assert "subset" in v.witness


def test_trace_P0_minor_certificate(orthant2):
    F = LinearMap(orthant2, [[1.0, 0.0], [0.0, 0.0]])
    assert probe_trace_P(orthant2, F, "trace_P0").holds
    assert not probe_trace_P(orthant2, F, "trace_P").holds


def test_skew_map_trace_dichotomy(vinberg):
    F = skew_linear(vinberg)
    v = probe_trace_P(vinberg, F, "trace_P", samples=120, seed=0)
    assert v.mode == "sampled"
    assert not v.holds
    assert v.witness["max"] <= 1e-9

    v0 = probe_trace_P(vinberg, F, "trace_P0", samples=120, seed=0)
    assert v0.holds
    assert "shifted map scan" in v0.note


def test_uniform_trace_P_certificate(vinberg):
    F = strongly_monotone_map(vinberg)
    v = probe_trace_P(vinberg, F, "uniform_trace_P")
    assert v.holds and v.mode == "certified"
    assert v.modulus >= 0.15


def test_uniform_trace_P_refuted_by_sampling(vinberg):
    v = probe_trace_P(vinberg, skew_linear(vinberg), "uniform_trace_P",
                      samples=60, seed=0)
    assert v.mode == "sampled"
    assert not v.holds


# ----------------------------------------------------------------------
# block P family


def test_P_probe_orthant(orthant2):
    ident = LinearMap(orthant2, np.eye(2))
    assert probe_P(orthant2, ident, "P", samples=60).holds

    neg = LinearMap(orthant2, -np.eye(2))
    v = probe_P(orthant2, neg, "P", samples=60)
    assert not v.holds
    assert np.allclose(np.abs(v.witness["z"]), [1.0, 0.0], atol=1e-12)


def test_order_P_probe(orthant2):
    assert probe_P(orthant2, LinearMap(orthant2, np.eye(2)), "order_P",
                   samples=40).holds
    v = probe_P(orthant2, LinearMap(orthant2, -np.eye(2)), "order_P",
                samples=40)
    assert not v.holds
    assert "wedge" in v.witness


def test_P0_boundary_map_does_not_leak(orthant2):
    M = np.array([[1.0, 0.0], [0.0, 0.0]])

    def f(z):
        alg = z.algebra
        return alg.from_natural(M @ alg.natural(z))

    assert probe_P(orthant2, f, "P0", samples=60).holds
    v = probe_P(orthant2, f, "P", samples=60)
    assert not v.holds
    assert np.allclose(np.abs(v.witness["z"]), [0.0, 1.0], atol=1e-12)


# ----------------------------------------------------------------------
# R0


def test_R0_support_enumeration(orthant2):
    v = probe_R0(orthant2, LinearMap(orthant2, np.eye(2)))
    assert v.holds and v.mode == "certified"

    v = probe_R0(orthant2, LinearMap(orthant2, [[1.0, 0.0], [0.0, 0.0]]))
    assert not v.holds and v.mode == "certified"
    assert np.allclose(v.witness["ray"], [0.0, 1.0], atol=1e-9)
    d = v.to_dict()
    assert isinstance(d["witness"]["ray"], list)


def test_R0_zero_map_ray(vinberg):
    f = builtin_map(vinberg, "zero")
    v = probe_R0(vinberg, f, samples=2, scale_schedule=(1.0,))
    assert not v.holds
    ray = np.asarray(v.witness["ray"])
    expect = np.array([1.0, 0.0, 1.0, 0.0, 1.0]) / np.sqrt(3.0)
    assert np.allclose(ray, expect, atol=1e-8)


def test_R0_strong_monotonicity_shortcut(vinberg):
    v = probe_R0(vinberg, strongly_monotone_map(vinberg))
    assert v.holds and v.mode == "certified"
    assert "monotonicity" in v.note


# ----------------------------------------------------------------------
# Lipschitz, admissibility, squares


def test_lipschitz_linear_certified(vinberg):
    F = strongly_monotone_map(vinberg)
    kappa, mode = estimate_lipschitz(vinberg, F)
    assert mode == "certified"
    assert abs(kappa - np.linalg.norm(F.iso_matrix(), 2)) < 1e-12


def test_lipschitz_projection_nonexpansive(vinberg):
    kappa, mode = estimate_lipschitz(vinberg, project_K, samples=40, seed=3)
    assert mode == "sampled"
    assert kappa <= 1.0 + 1e-8


def test_identity_perturbation_admissible(vinberg):
    rep = check_B_admissible(vinberg, None, samples=600, seed=0)
    assert rep.min_margin >= -1e-9


def test_negated_identity_not_admissible(vinberg):
    with pytest.raises(ValueError):
        check_B_admissible(vinberg, lambda z: -1.0 * z, samples=200)


def test_square_in_sum_builtins(builtin_algebras):
    for alg in builtin_algebras:
        v = probe_square_in_sum(alg, samples=100, seed=1)
        assert v.holds, alg


# ----------------------------------------------------------------------
# audit


def test_audit_consistent_on_strongly_monotone(vinberg):
    report = implication_audit(vinberg, strongly_monotone_map(vinberg),
                               samples=80, seed=2)
    assert report.consistent
    assert not report.transfers
    assert all(v.holds for v in report.verdicts.values())
    assert "holds" in report.summary()


def test_audit_transfers_downstream_witness(vinberg):
    F = skew_linear(vinberg)
    fake = PropertyVerdict("strict", True, "sampled", 1.0, None, 50)
    report = implication_audit(vinberg, F, samples=60, seed=0,
                               verdicts={"strict": fake})
    assert report.consistent
    assert {"from": "trace_P", "to": "strict"} in report.transfers
    strict = report.verdicts["strict"]
    assert not strict.holds
    assert "trace_P" in strict.note


def test_audit_flags_certified_conflict(vinberg):
    F = skew_linear(vinberg)
    fake = PropertyVerdict("strict", True, "certified", 1.0, None, 0)
    report = implication_audit(vinberg, F, samples=60, seed=0,
                               verdicts={"strict": fake})
    assert not report.consistent
    assert len(report.inconsistencies) == 1
    assert report.verdicts["strict"].holds


def test_implication_edges_frozen():
    assert set(IMPLICATION_EDGES) == {
        ("strong", "uniform_trace_P"),
        ("uniform_trace_P", "trace_P"),
        ("trace_P", "trace_P0"),
        ("strong", "strict"),
        ("strict", "trace_P"),
        ("trace_P", "P"),
        ("monotone", "trace_P0"),
        ("trace_P0", "P0"),
    }
