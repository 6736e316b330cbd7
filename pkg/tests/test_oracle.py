import numpy as np
from hypothesis import given, strategies as st

from cstarmod import matkit, oracle
from cstarmod.hmod import Submodule, intersect, submodule_sum

from conftest import cmat, space

seeds = st.integers(0, 2**32 - 1)


def low_rank(rng, m, n, r):
    return cmat(rng, m, r) @ cmat(rng, r, n)


def test_rref_small_example():
    r, piv = oracle.rref(np.array([[1.0, 2.0, 3.0], [2.0, 4.0, 7.0]]))
    assert piv == [0, 2]
    np.testing.assert_allclose(r, [[1, 2, 0], [0, 0, 1]], atol=1e-14)


def test_kernel_basis_uses_row_convention():
    b = np.array([[1.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    k = oracle.kernel_basis(b)
    assert k.shape == (1, 3)
    np.testing.assert_allclose(k @ b, 0.0, atol=1e-14)


def test_intersection_of_planes():
    u = np.array([[1.0, 0, 0], [0, 1.0, 0]])
    w = np.array([[0, 1.0, 0], [0, 0, 1.0]])
    got = oracle.intersection_basis(u, w)
    assert got.shape[0] == 1
    assert oracle.same_subspace(got, np.array([[0, 1.0, 0]]))


@given(m=st.integers(1, 6), n=st.integers(1, 6), r=st.integers(0, 6), seed=seeds)
def test_oracle_rank_matches_svd(m, n, r, seed):
    a = low_rank(np.random.default_rng(seed), m, n, min(r, m, n))
    assert oracle.row_space_basis(a).shape[0] == matkit.numerical_rank(a)


@given(n=st.integers(2, 8), a=st.integers(0, 8), b=st.integers(0, 8), seed=seeds)
def test_oracle_sum_and_intersection_match_projection_route(n, a, b, seed):
    rng = np.random.default_rng(seed)
    sp = space((1,), n)
    u = cmat(rng, min(a, n), n)
    w = cmat(rng, min(b, n), n)
    mu = Submodule.from_rows(sp, [u])
    mw = Submodule.from_rows(sp, [w])
    assert oracle.same_subspace(oracle.sum_basis(u, w), submodule_sum(mu, mw).bases[0])
    assert oracle.same_subspace(oracle.intersection_basis(u, w), intersect(mu, mw).bases[0])


def test_oracle_sees_nontrivial_intersection():
    rng = np.random.default_rng(11)
    shared = cmat(rng, 2, 6)
    u = np.vstack([shared, cmat(rng, 1, 6)])
    w = np.vstack([cmat(rng, 2, 2) @ shared, cmat(rng, 2, 6)])
    got = oracle.intersection_basis(u, w)
    assert got.shape[0] == 2
    assert oracle.same_subspace(got, matkit.row_space(shared, 1e-12))
