import numpy as np
import numpy.testing as npt
import pytest
from hypothesis import given, settings, strategies as st

from tcone import TAlgebra, build_builtin, verify_axioms

# Frozen worked example on the Vinberg cone algebra: the product of the
# Hermitian elements x = (5,-2,1,-2,5) and y = (1,2,4,2,4) in matrix form is
#
#   [ -3  2  2 ]
#   [  0  0  0 ]
#   [  8  0 16 ]
#
# where the (1,2) and (2,1) entries are forced to zero by the empty block,
# even though the naive 3x3 matrix product has -4 there.
X5 = np.array([5.0, -2.0, 1.0, -2.0, 5.0])
Y5 = np.array([1.0, 2.0, 4.0, 2.0, 4.0])
XY_BLOCKS = {
    (0, 0): -3.0, (0, 1): 2.0, (0, 2): 2.0,
    (1, 0): 0.0, (1, 1): 0.0,
    (2, 0): 8.0, (2, 2): 16.0,
}


def embed3(alg, a):
    """Vinberg element -> 3x3 matrix with the (1,2)/(2,1) hole at zero."""
    m = np.zeros((3, 3))
    for (i, j) in alg.blocks:
        m[i, j] = a.block(i, j)[0]
    return m


def psd_embed(alg, a):
    n = alg.rank
    m = np.empty((n, n))
    for i in range(n):
        for j in range(n):
            m[i, j] = a.block(i, j)[0]
    return m


def test_builtin_shapes(vinberg, orthant4, psd3):
    assert vinberg.dim == 7 and vinberg.dim_herm == 5 and vinberg.rank == 3
    assert orthant4.dim == 4 and orthant4.dim_herm == 4
    assert psd3.dim == 9 and psd3.dim_herm == 6


def test_vinberg_natural_chart_order(vinberg):
    x = vinberg.from_natural(X5)
    assert x.block(0, 0)[0] == 5.0
    assert x.block(0, 1)[0] == -2.0
    assert x.block(1, 0)[0] == -2.0
    assert x.block(1, 1)[0] == 1.0
    assert x.block(0, 2)[0] == -2.0
    assert x.block(2, 2)[0] == 5.0
    npt.assert_array_equal(vinberg.natural(x), X5)


def test_vinberg_worked_product_exact(vinberg):
    x = vinberg.from_natural(X5)
    y = vinberg.from_natural(Y5)
    p = vinberg.mul(x, y)
    for (i, j), v in XY_BLOCKS.items():
        assert p.block(i, j)[0] == v, (i, j)
    assert vinberg.trace_component(p, 0) == -3.0
    assert vinberg.trace(p) == 13.0
    assert vinberg.inner(x, y) == 13.0


def test_vinberg_inner_product_weights(vinberg):
    # <x, y> = x1 y1 + x3 y3 + x5 y5 + 2 x2 y2 + 2 x4 y4 on the natural chart
    rng = np.random.default_rng(7)
    w = np.array([1.0, 2.0, 1.0, 2.0, 1.0])
    for _ in range(20):
        a, b = rng.normal(size=5), rng.normal(size=5)
        got = vinberg.inner(vinberg.from_natural(a), vinberg.from_natural(b))
        npt.assert_allclose(got, np.sum(w * a * b), rtol=1e-13)


def test_vinberg_matches_embedded_matrix_product_except_hole(vinberg):
    rng = np.random.default_rng(3)
    for _ in range(25):
        a = vinberg.element(rng.normal(size=7))
        b = vinberg.element(rng.normal(size=7))
        naive = embed3(vinberg, a) @ embed3(vinberg, b)
        ours = embed3(vinberg, vinberg.mul(a, b))
        hole = np.zeros((3, 3), dtype=bool)
        hole[1, 2] = hole[2, 1] = True
        npt.assert_allclose(ours[~hole], naive[~hole], atol=1e-12)
        npt.assert_array_equal(ours[hole], 0.0)


def test_vinberg_is_not_associative(vinberg):
    # f01 (f10 f02) = 0 because f10 f02 lands in the empty (1,2) block,
    # while (f01 f10) f02 = f02.
    f01 = vinberg.from_blocks({(0, 1): [1.0]})
    f10 = vinberg.from_blocks({(1, 0): [1.0]})
    f02 = vinberg.from_blocks({(0, 2): [1.0]})
    lhs = vinberg.mul(f01, vinberg.mul(f10, f02))
    rhs = vinberg.mul(vinberg.mul(f01, f10), f02)
    assert vinberg.norm(lhs - rhs) == 1.0
    assert np.all(lhs.coeffs == 0.0)


def test_psd_embedding_is_matrix_algebra(psd3):
    rng = np.random.default_rng(11)
    for _ in range(25):
        a = psd3.element(rng.normal(size=9))
        b = psd3.element(rng.normal(size=9))
        npt.assert_allclose(psd_embed(psd3, psd3.mul(a, b)),
                            psd_embed(psd3, a) @ psd_embed(psd3, b), atol=1e-12)
        npt.assert_allclose(psd_embed(psd3, psd3.star(a)),
                            psd_embed(psd3, a).T, atol=0)
        npt.assert_allclose(psd3.trace(a), np.trace(psd_embed(psd3, a)), atol=0)
        npt.assert_allclose(psd3.inner(a, b),
                            np.sum(psd_embed(psd3, a) * psd_embed(psd3, b)),
                            atol=1e-12)


def test_orthant_is_hadamard(orthant4):
    rng = np.random.default_rng(5)
    a = orthant4.element(rng.normal(size=4))
    b = orthant4.element(rng.normal(size=4))
    npt.assert_array_equal(orthant4.mul(a, b).coeffs, a.coeffs * b.coeffs)
    npt.assert_array_equal(orthant4.star(a).coeffs, a.coeffs)
    assert orthant4.trace(a) == a.coeffs.sum()


def test_unit_acts_as_identity(builtin_algebras):
    rng = np.random.default_rng(9)
    for alg in builtin_algebras:
        e = alg.unit()
        a = alg.element(rng.normal(size=alg.dim))
        npt.assert_allclose(alg.mul(e, a).coeffs, a.coeffs, atol=1e-14)
        npt.assert_allclose(alg.mul(a, e).coeffs, a.coeffs, atol=1e-14)
        parts = sum((alg.unit_i(i).coeffs for i in range(alg.rank)),
                    np.zeros(alg.dim))
        npt.assert_array_equal(e.coeffs, parts)
        for i in range(alg.rank):
            ei = alg.unit_i(i)
            npt.assert_array_equal(alg.mul(ei, ei).coeffs, ei.coeffs)


def test_hermitian_roundtrip_and_check(builtin_algebras):
    rng = np.random.default_rng(13)
    for alg in builtin_algebras:
        c = rng.normal(size=alg.dim_herm)
        x = alg.from_natural(c)
        assert alg.is_hermitian(x)
        npt.assert_allclose(alg.natural(x), c, atol=0)
        npt.assert_allclose(alg.norm(x) ** 2,
                            np.dot(alg.iso_from_natural(c), alg.iso_from_natural(c)),
                            rtol=1e-12)
        y = alg.element(rng.normal(size=alg.dim))
        herm = alg.hermitian_part(y)
        assert alg.is_hermitian(herm)


def test_axioms_pass_exactly_on_builtins(builtin_algebras):
    for alg in builtin_algebras:
        rep = verify_axioms(alg, tol=0.0)
        assert rep.passed, rep.summary()
        for c in rep.checks.values():
            assert c.max_error == 0.0 or c.note.startswith("trace form")


def test_axioms_pass_with_scaled_rho():
    # same orthant cone, basis vector of each diagonal block identified with 2
    sc = {(i, i, i): np.full((1, 1, 1), 2.0) for i in range(3)}
    alg = TAlgebra(3, np.eye(3, dtype=int), sc, rho=[2.0, 2.0, 2.0], name="scaled")
    rep = verify_axioms(alg, tol=0.0)
    assert rep.passed, rep.summary()
    e = alg.unit()
    a = alg.element(np.array([3.0, -1.0, 0.5]))
    npt.assert_array_equal(alg.mul(e, a).coeffs, a.coeffs)
    assert alg.trace(e) == 3.0


def _mutate_constant(alg, key, pos, value):
    sc = {k: v.copy() for k, v in alg.structure_constants.items()}
    sc[key][pos] = value
    return TAlgebra(alg.rank, alg.block_dims, sc,
                    {k: v.copy() for k, v in alg.involution_maps.items()},
                    alg.rho.copy(), name=alg.name + "+mut")


def test_every_vinberg_constant_mutation_is_caught(vinberg):
    rng = np.random.default_rng(42)
    keys = sorted(vinberg.structure_constants)
    for k, key in enumerate(keys):
        for value in (0.0, 2.0, 1.0 + 0.5 * (1 + (k % 3))):
            mut = _mutate_constant(vinberg, key, (0, 0, 0), value)
            if value == 1.0:
                continue
            rep = verify_axioms(mut, tol=0.0)
            assert not rep.passed, "mutation %s=%s escaped" % (key, value)
    # random seeded mutations as well
    for _ in range(20):
        key = keys[rng.integers(len(keys))]
        value = float(rng.normal()) * 2.0
        if abs(value - 1.0) < 1e-3:
            continue
        rep = verify_axioms(_mutate_constant(vinberg, key, (0, 0, 0), value), tol=0.0)
        assert not rep.passed


def test_zeroed_exchange_constant_breaks_positivity(vinberg):
    # zero A[0][1] x A[1][0] -> A[0][0]: the trace form acquires a null
    # direction in the exchanged pair, so positivity (and with it the trace
    # symmetry) must fail
    mut = _mutate_constant(vinberg, (0, 1, 0), (0, 0, 0), 0.0)
    rep = verify_axioms(mut, tol=0.0)
    assert not rep.checks["V"].passed or not rep.checks["III"].passed
    f10 = mut.from_blocks({(1, 0): [1.0]})
    assert mut.inner(f10, f10) == 0.0


def test_involution_mutation_is_caught(vinberg):
    inv = {k: v.copy() for k, v in vinberg.involution_maps.items()}
    inv[(0, 1)] = np.array([[-1.0]])
    mut = TAlgebra(3, vinberg.block_dims,
                   {k: v.copy() for k, v in vinberg.structure_constants.items()},
                   inv, name="vinberg5+inv")
    rep = verify_axioms(mut, tol=0.0)
    assert not rep.passed
    assert not rep.checks["inv_involutive"].passed or not rep.checks["inv_antihom"].passed


def test_structural_validation_errors():
    with pytest.raises(ValueError):
        TAlgebra(2, np.array([[2, 0], [0, 1]]), {})
    with pytest.raises(ValueError):
        TAlgebra(2, np.array([[1, 1], [0, 1]]), {})
    with pytest.raises(ValueError):
        build_builtin("nope")
    alg = build_builtin("orthant", 2)
    other = build_builtin("orthant", 2)
    with pytest.raises(ValueError):
        alg.mul(alg.unit(), other.unit())
    with pytest.raises(ValueError):
        alg.from_natural([1.0, 2.0, 3.0])


small_floats = st.floats(min_value=-10, max_value=10, allow_nan=False)


@settings(max_examples=60, deadline=None)
@given(st.lists(small_floats, min_size=21, max_size=21), small_floats)
def test_bilinear_and_adjoint_identities(vals, s):
    alg = build_builtin("vinberg5")
    v = np.array(vals)
    a = alg.element(v[:7])
    b = alg.element(v[7:14])
    c = alg.element(v[14:21])
    npt.assert_allclose(alg.mul(a + b, c).coeffs,
                        (alg.mul(a, c) + alg.mul(b, c)).coeffs, atol=1e-9)
    npt.assert_allclose(alg.mul(a, s * b).coeffs, s * alg.mul(a, b).coeffs,
                        atol=1e-9)
    npt.assert_allclose(alg.star(alg.mul(a, b)).coeffs,
                        alg.mul(alg.star(b), alg.star(a)).coeffs, atol=1e-9)
    npt.assert_allclose(alg.trace(alg.mul(a, b)), alg.trace(alg.mul(b, a)),
                        atol=1e-8)
    # <ab, c> = <b, a* c> = <a, c b*>
    lhs = alg.inner(alg.mul(a, b), c)
    npt.assert_allclose(lhs, alg.inner(b, alg.mul(alg.star(a), c)), atol=1e-7)
    npt.assert_allclose(lhs, alg.inner(a, alg.mul(c, alg.star(b))), atol=1e-7)
