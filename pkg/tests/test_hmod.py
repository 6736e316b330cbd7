import numpy as np
import pytest
from hypothesis import given, strategies as st

from cstarmod import cstar
from cstarmod.cstar import BlockAlgebra
from cstarmod.errors import AlgebraMismatch, SpaceMismatch
from cstarmod.hmod import (
    Submodule,
    complement,
    direct_sum,
    inner_product,
    intersect,
    is_orthogonal_summand,
    membership_residual,
    projection_distance,
    projection_onto,
    span,
    submodule_sum,
    vector_norm,
)
from cstarmod.modop import ModuleOperator, distance

from conftest import FAMILIES, space

families = st.sampled_from(FAMILIES)
ranks = st.integers(1, 3)
seeds = st.integers(0, 2**32 - 1)


def random_submodule(sp, rng, count=None):
    count = int(rng.integers(0, sp.rank + 1)) if count is None else count
    return span([sp.random_vector(rng) for _ in range(count)], sp)


def test_generators_are_orthonormal():
    sp = space((1, 2), 2)
    e1, e2 = sp.generator(0), sp.generator(1)
    assert inner_product(e1, e2).allclose(sp.algebra.zero())
    assert inner_product(e1, e1).allclose(sp.algebra.identity())
    assert vector_norm(e1) == pytest.approx(1.0)
    assert vector_norm(sp.zero()) == 0.0


def test_inner_product_of_first_coordinates(rng):
    sp = space((1, 2), 2)
    alg = sp.algebra
    a, b = alg.random_element(rng), alg.random_element(rng)
    x = sp.from_coordinates([a, alg.zero()])
    y = sp.from_coordinates([b, alg.zero()])
    assert inner_product(x, y).allclose(a @ b.H)
    assert vector_norm(x) == pytest.approx(cstar.norm(a))


def test_inner_product_space_mismatch(rng):
    with pytest.raises(SpaceMismatch):
        inner_product(space((1,), 2).random_vector(rng), space((1,), 3).random_vector(rng))


@given(dims=families, k=ranks, seed=seeds)
def test_inner_product_axioms(dims, k, seed):
    rng = np.random.default_rng(seed)
    sp = space(dims, k)
    x, y = sp.random_vector(rng), sp.random_vector(rng)
    a = sp.algebra.random_element(rng)
    # A-linear in the first slot, conjugate symmetric, Cauchy-Schwarz
    assert inner_product(x.left_multiply(a), y).allclose(a @ inner_product(x, y), atol=1e-9)
    assert inner_product(y, x).allclose(inner_product(x, y).H, atol=1e-10)
    assert cstar.norm(inner_product(x, y)) <= vector_norm(x) * vector_norm(y) * (1 + 1e-12)
    assert cstar.is_positive(inner_product(x, x))


def test_span_examples():
    sp = space((1, 2), 2)
    e1, e2 = sp.generator(0), sp.generator(1)
    coord = span([e1])
    assert coord.dims == (1, 2)
    assert coord.contains(sp.from_coordinates([sp.algebra.random_element(np.random.default_rng(0)), sp.algebra.zero()]))
    assert span([e1, e2]).equals(sp.full())
    assert span([], sp).is_zero

    line = span([space((1,), 2).vector([np.array([[1.0, 1.0]]) / np.sqrt(2)])])
    np.testing.assert_allclose(projection_onto(line).blocks[0], np.full((2, 2), 0.5), atol=1e-15)


def test_set_operation_examples():
    sp = space((1, 2), 2)
    assert complement(sp.full()).is_zero
    x_line = span([sp.generator(0)])
    y_line = span([sp.generator(1)])
    assert submodule_sum(x_line, y_line).equals(sp.full())

    plane = space((1,), 2)
    x_axis = span([plane.vector([np.array([[1.0, 0.0]])])])
    diag = span([plane.vector([np.array([[1.0, 1.0]])])])
    assert intersect(x_axis, diag).is_zero


def test_set_operations_reject_mixed_spaces():
    with pytest.raises(SpaceMismatch):
        submodule_sum(space((1,), 2).full(), space((1,), 3).full())


@given(dims=families, k=ranks, seed=seeds)
def test_complement_involution_and_de_morgan(dims, k, seed):
    rng = np.random.default_rng(seed)
    sp = space(dims, k)
    m, n = random_submodule(sp, rng), random_submodule(sp, rng)
    assert projection_distance(complement(complement(m)), m) <= 1e-8
    lhs = complement(submodule_sum(m, n))
    rhs = intersect(complement(m), complement(n))
    assert projection_distance(lhs, rhs) <= 1e-8
    assert is_orthogonal_summand(m)


@given(dims=families, k=ranks, seed=seeds)
def test_projection_fixes_members(dims, k, seed):
    rng = np.random.default_rng(seed)
    sp = space(dims, k)
    m = random_submodule(sp, rng, count=max(1, sp.rank - 1))
    x = m.random_member(rng)
    p = projection_onto(m)
    assert membership_residual(m, x) <= 1e-9 * max(1.0, vector_norm(x))
    assert vector_norm(p(x) - x) <= 1e-9 * max(1.0, vector_norm(x))


@given(dims=families, k=ranks, seed=seeds)
def test_span_is_closed_under_left_multiplication(dims, k, seed):
    rng = np.random.default_rng(seed)
    sp = space(dims, k)
    g = sp.random_vector(rng)
    m = span([g])
    assert m.contains(g.left_multiply(sp.algebra.random_element(rng)))


def test_summand_examples():
    sp = space((1, 2), 2)
    assert is_orthogonal_summand(sp.zero_submodule())
    assert is_orthogonal_summand(sp.full())
    assert is_orthogonal_summand(span([sp.random_vector(np.random.default_rng(1))]))


def test_direct_sum_examples():
    a1 = space((1, 2), 1)
    ds = direct_sum(a1, a1)
    assert ds.space == space((1, 2), 2)
    e1 = a1.generator(0)
    embedded = ds.embed_first()(e1)
    np.testing.assert_array_equal(embedded.blocks[0], ds.space.generator(0).blocks[0])
    np.testing.assert_array_equal(embedded.blocks[1], ds.space.generator(0).blocks[1])
    with pytest.raises(AlgebraMismatch):
        direct_sum(a1, space((2, 1), 1))


def test_direct_sum_projections(rng):
    e, f = space((1, 2), 1), space((1, 2), 2)
    ds = direct_sum(e, f)
    x, y = e.random_vector(rng), f.random_vector(rng)
    z = ds.pair(x, y)
    assert vector_norm(ds.project_first()(z) - x) <= 1e-12
    assert vector_norm(ds.project_second()(z) - y) <= 1e-12
    total = ds.embed_first().adjoint() @ ds.embed_first()
    assert distance(total, ModuleOperator.identity(e)) <= 1e-15


def test_submodule_basis_is_orthonormalized():
    sp = space((2,), 1)
    m = Submodule.from_rows(sp, [np.array([[1.0, 1.0], [2.0, 2.0]])])
    assert m.dims == (1,)
    b = m.bases[0]
    np.testing.assert_allclose(b @ b.conj().T, np.eye(1), atol=1e-15)
