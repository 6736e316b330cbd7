import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cstarmod import verifier
from cstarmod.errors import NotAProjection
from cstarmod.instances import (
    commuting_projection_pair,
    line_projection,
    nested_projection_pair,
    random_lambdas,
    random_nonzero_operator,
    random_operator,
    random_projection,
)
from cstarmod.modop import ModuleOperator, distance, operator_norm

from conftest import FAMILIES, space

families = st.sampled_from(FAMILIES)
ranks = st.integers(1, 3)
seeds = st.integers(0, 2**32 - 1)
PLANE = space((1,), 2)


def pair(dims, k, seed, kind="random"):
    rng = np.random.default_rng(seed)
    sp = space(dims, k)
    if kind == "commuting":
        return (*commuting_projection_pair(sp, rng), rng)
    if kind == "nested":
        return (*nested_projection_pair(sp, rng), rng)
    return random_projection(sp, rng), random_projection(sp, rng), rng


def operators(dims, e, k, m, seed):
    rng = np.random.default_rng(seed)
    s = random_nonzero_operator(space(dims, e), space(dims, k), rng)
    t = random_nonzero_operator(space(dims, k), space(dims, m), rng)
    return t, s, rng


def test_report_shape(rng):
    t = random_nonzero_operator(space((1, 2), 2), space((1, 2), 1), rng)
    rep = verifier.check_penrose(t)
    d = rep.to_dict()
    assert d["finite_dim_shadow"] is True
    assert set(d) >= {"check_name", "instance_descriptor", "residuals", "passed", "tolerance", "degenerate"}
    assert rep.passed


def test_failing_residual_fails_report():
    rep = verifier._verdict("x", {}, {"a": 1e-3, "b": 0.0}, 1e-6)
    assert not rep.passed
    assert not verifier._verdict("x", {}, {"a": float("nan")}, 1e-6).passed


@given(dims=families, k=ranks, m=ranks, seed=seeds)
def test_penrose_and_closed_range(dims, k, m, seed):
    rng = np.random.default_rng(seed)
    t = random_nonzero_operator(space(dims, k), space(dims, m), rng)
    assert verifier.check_penrose(t).passed
    assert verifier.check_closed_range_tt(t, rng).passed


def test_koliha_examples():
    one = ModuleOperator.identity(space((1, 2), 2))
    diff, total = verifier.koliha_residuals(one, one, 2.0)
    assert diff == 0.0 and total == 0.0
    p = line_projection(PLANE, [0.3])
    q = line_projection(PLANE, [1.1])
    assert max(verifier.koliha_residuals(p, q, 0.0)) <= 1e-15


def test_difference_identity_needs_lambda_plus_one_minus_q():
    # with third factor (lambda - 1 + Q) the difference identity does not hold;
    # with (lambda + 1 - Q) it does
    p = line_projection(PLANE, [0.3])
    q = line_projection(PLANE, [1.1])
    lam = 0.7 + 0.2j
    one = ModuleOperator.identity(PLANE)
    lhs = ((lam - 1) * one + p) @ (lam * one - (p - q)) @ ((lam - 1) * one + q)
    rhs = lam * ((lam * lam - 1) * one + p @ q)
    assert distance(lhs, rhs) > 0.1
    assert verifier.koliha_residuals(p, q, lam)[0] <= 1e-14


@given(dims=families, k=ranks, seed=seeds, kind=st.sampled_from(["random", "commuting", "nested"]))
def test_koliha_random(dims, k, seed, kind):
    p, q, rng = pair(dims, k, seed, kind)
    assert verifier.check_koliha_identities(p, q, random_lambdas(rng)).passed


def test_koliha_residual_growth_is_at_most_cubic(rng):
    p, q = random_projection(space((2, 3), 3), rng), random_projection(space((2, 3), 3), rng)
    for lam in random_lambdas(rng, 20, radius=1.0):
        small = max(verifier.koliha_residuals(p, q, lam))
        big = max(verifier.koliha_residuals(p, q, 2 * lam))
        assert big <= 8 * max(small, 1e-15) + 1e-13


def test_koliha_rejects_non_projection():
    with pytest.raises(NotAProjection):
        verifier.check_koliha_identities(2 * ModuleOperator.identity(PLANE), line_projection(PLANE, [0.0]), [1.0])


def test_spectral_correspondence_at_quarter_turn():
    p = line_projection(PLANE, [np.pi / 4])
    q = line_projection(PLANE, [0.0])
    sc = verifier.spectral_correspondence(p, q)
    c = np.sqrt(0.5)
    np.testing.assert_allclose(np.sort(sc["sigma_sum"]), [1 - c, 1 + c], atol=1e-12)
    assert sc["forward"] <= 1e-12 and sc["backward"] <= 1e-12 and sc["multiset"] <= 1e-12
    # both branches 1 +- sqrt(mu) land on the single point mu = 1/2 of sigma(PQ);
    # counted with multiplicity, the two sides differ in size
    images = (sc["sigma_sum"] - 1) ** 2
    mu = sc["sigma_product"][sc["sigma_product"] > 1e-10]
    assert images.size == 2 and mu.size == 1


@given(dims=families, k=ranks, seed=seeds, kind=st.sampled_from(["random", "commuting", "nested"]))
def test_spectral_random(dims, k, seed, kind):
    p, q, _ = pair(dims, k, seed, kind)
    assert verifier.check_spectral_correspondence(p, q).passed


def test_range_sum_examples(rng):
    sp = space((1, 2), 2)
    p = random_projection(sp, rng)
    rep = verifier.check_range_sum_identity(p, p)
    assert rep.passed
    one = ModuleOperator.identity(sp)
    rep = verifier.check_range_sum_identity(one, ModuleOperator.zero(sp, sp))
    assert rep.passed


@given(dims=families, k=ranks, seed=seeds, kind=st.sampled_from(["random", "commuting", "nested"]))
def test_range_sum_random(dims, k, seed, kind):
    p, q, _ = pair(dims, k, seed, kind)
    assert verifier.check_range_sum_identity(p, q).passed


def test_transfer_examples(rng):
    sp = space((1, 2), 2)
    one = ModuleOperator.identity(sp)
    assert verifier.check_prop_generalized_inverse_transfer(one, one).passed
    t = random_operator(sp, sp, rng, rank_profile=[2, 4])
    s = random_operator(sp, sp, rng, rank_profile=[2, 4])
    assert verifier.check_prop_generalized_inverse_transfer(t, s).passed


@given(dims=families, e=ranks, k=ranks, m=ranks, seed=seeds)
def test_transfer_random(dims, e, k, m, seed):
    t, s, _ = operators(dims, e, k, m, seed)
    assert verifier.check_prop_generalized_inverse_transfer(t, s).passed


def test_theorem_examples(rng):
    sp = space((1, 2), 2)
    t = random_operator(sp, sp, rng, rank_profile=[2, 4])
    s = random_operator(sp, sp, rng, rank_profile=[2, 4])
    rep = verifier.check_theorem_equivalences(t, s)
    assert rep.passed and rep.metrics["closed_range"] and not rep.degenerate
    p = random_projection(sp, rng)
    rep = verifier.check_theorem_equivalences(p, p.one_minus())
    assert rep.passed and rep.degenerate


@settings(max_examples=25)
@given(e=ranks, k=ranks, m=ranks, seed=seeds)
def test_theorem_random_three_blocks(e, k, m, seed):
    t, s, _ = operators((1, 2, 3), e, k, m, seed)
    rep = verifier.check_theorem_equivalences(t, s)
    assert rep.passed


def test_commuting_examples(rng):
    sp = space((1, 2), 2)
    p, q = commuting_projection_pair(sp, rng)
    rep = verifier.check_commuting_projections(p, q)
    assert rep.passed and rep.metrics["all_true"]
    rep = verifier.check_commuting_projections(line_projection(PLANE, [np.pi / 4]), line_projection(PLANE, [0.0]))
    assert rep.passed and not rep.metrics["all_true"]
    res = verifier.commuting_condition_residuals(line_projection(PLANE, [np.pi / 4]), line_projection(PLANE, [0.0]))
    assert min(res.values()) > 1e-3
    p, q = nested_projection_pair(sp, rng)
    rep = verifier.check_commuting_projections(p, q)
    assert rep.passed and rep.metrics["all_true"] and rep.metrics["subset"]
    assert distance(q @ p, p) <= 1e-12


@given(dims=families, k=ranks, seed=seeds, kind=st.sampled_from(["random", "commuting", "nested"]))
def test_commuting_random(dims, k, seed, kind):
    p, q, _ = pair(dims, k, seed, kind)
    assert verifier.check_commuting_projections(p, q).passed


def test_mp_product_examples():
    sp = space((1, 2), 2)
    one = ModuleOperator.identity(sp)
    rep = verifier.check_mp_of_product_boundedness(one, one)
    assert rep.passed and rep.metrics["mp_norm"] == pytest.approx(1.0)
    p = line_projection(PLANE, [0.0])
    rep = verifier.check_mp_of_product_boundedness(p, p.one_minus())
    assert rep.degenerate and rep.metrics["mp_norm"] == 0.0


@given(dims=families, e=ranks, k=ranks, m=ranks, seed=seeds)
def test_mp_product_random(dims, e, k, m, seed):
    t, s, _ = operators(dims, e, k, m, seed)
    assert verifier.check_mp_of_product_boundedness(t, s).passed


@given(dims=families, e=ranks, k=ranks, m=ranks, seed=seeds)
def test_angle_and_oracle_random(dims, e, k, m, seed):
    t, s, _ = operators(dims, e, k, m, seed)
    assert verifier.check_angle_identity(t, s).passed
    if max(e, k, m) * sum(dims) <= 12:
        assert verifier.check_subspace_oracle(t, s).passed


@given(dims=families, k=ranks, seed=seeds)
def test_inequality_random(dims, k, seed):
    p, q, rng = pair(dims, k, seed)
    rep = verifier.check_inequality(p, q, rng)
    assert rep.passed


def test_inequality_degenerate_when_product_vanishes():
    rep = verifier.check_inequality(line_projection(PLANE, [np.pi / 2]), line_projection(PLANE, [0.0]))
    assert rep.degenerate and rep.passed


def test_range_sum_against_oracle(rng):
    from cstarmod import oracle
    from cstarmod.modop import range_

    for dims in [(1,), (2,), (1, 1), (1, 2), (2, 3)]:
        for k in (1, 2):
            sp = space(dims, k)
            p, q = random_projection(sp, rng), random_projection(sp, rng)
            x = p.one_minus() + q
            lhs = range_(x, verifier.scaled_tol(x, 3.0))
            for i in range(len(dims)):
                # absolute threshold: 1 - P is rounding noise when P = 1
                ranges = [oracle.row_space_basis(b, atol=1e-9) for b in (p.one_minus().blocks[i], q.blocks[i])]
                rows = oracle.row_space_basis(np.vstack(ranges), atol=1e-9)
                assert oracle.same_subspace(rows, lhs.bases[i])


def test_summarize_counts():
    reps = [
        verifier._verdict("x", {}, {"a": 0.0}, 1.0),
        verifier._verdict("x", {}, {"a": 2.0}, 1.0),
        verifier._verdict("x", {}, {}, 1.0, degenerate=True),
    ]
    s = verifier.summarize(reps)
    assert (s["passed"], s["failed"], s["degenerate"]) == (1, 1, 1)
    assert s["max_residual"]["a"] == 2.0


def test_scaled_tolerance_tracks_cancellation():
    p = line_projection(PLANE, [0.0])
    full = p + p.one_minus()
    noise = full.one_minus()
    assert operator_norm(noise) <= 1e-15
    from cstarmod.modop import range_

    assert range_(noise, verifier.scaled_tol(noise, 2.0)).is_zero
