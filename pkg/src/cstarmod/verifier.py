"""Executable checks of the closed-range results, one function per statement.

Each check takes concrete operators, evaluates both sides of the statement in
finite dimensions and returns a :class:`VerdictReport`. In finite dimension
every range is closed, so closedness statements are exercised through their
finite-dimensional shadows (range identities, spectral correspondences,
constructive inverses); every report carries ``finite_dim_shadow=True``.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import oracle
from .angles import (
    angle_identity,
    dixmier_cosine,
    inequality_defect,
    m_submodule,
    r_commutation_residual,
    r_projection,
)
from .cstar import AlgebraElement, BlockAlgebra, spectrum
from .errors import ZeroProduct
from .hmod import (
    Submodule,
    complement,
    intersect,
    is_orthogonal_summand,
    projection_distance,
    submodule_sum,
    summand_residual,
    vector_norm,
)
from .modop import (
    ModuleOperator,
    distance,
    gamma,
    generalized_inverse_residuals,
    kernel,
    mp_inverse,
    operator_norm,
    penrose_residuals,
    projection_residual,
    range_,
    range_gap,
    require_projection,
)

DEFAULT_TOLERANCES = {
    "penrose": 1e-10,
    "gamma_product": 1e-8,
    "gamma_adjoint": 1e-10,
    "range_gap": 1e-9,
    "submodule": 1e-8,
    "mp_adjoint": 1e-9,
    "bounded_below": 1e-9,
    "generalized_inverse": 1e-9,
    "koliha": 1e-10,
    "spectral": 1e-6,
    "projection": 1e-9,
    "angle": 1e-8,
    "defect": 1e-8,
    "condition": 1e-8,
}

# eigenvalues of P+Q within this distance of 0, and (lambda-1)^2 / spectrum
# points of PQ below SPECTRAL_ZERO, are treated as the excluded values
SPECTRAL_EXCLUDE = 1e-9
SPECTRAL_ZERO = 1e-10
_NO_PARTNER = 1.0


@dataclass
class VerdictReport:
    check_name: str
    instance_descriptor: dict
    residuals: dict
    passed: bool
    tolerance: float
    tolerances: dict = field(default_factory=dict)
    metrics: dict = field(default_factory=dict)
    degenerate: bool = False
    finite_dim_shadow: bool = True

    def to_dict(self) -> dict:
        return asdict(self)


def _verdict(
    name: str,
    instance: dict,
    residuals: dict,
    tolerance: float,
    tolerances: dict | None = None,
    metrics: dict | None = None,
    degenerate: bool = False,
) -> VerdictReport:
    tolerances = tolerances or {}
    tols = {k: float(tolerances.get(k, tolerance)) for k in residuals}
    residuals = {k: float(v) for k, v in residuals.items()}
    # NaN compares false, so it fails
    passed = all(residuals[k] <= tols[k] for k in residuals)
    return VerdictReport(
        check_name=name,
        instance_descriptor=dict(instance),
        residuals=residuals,
        passed=passed,
        tolerance=float(tolerance),
        tolerances=tols,
        metrics={k: (float(v) if isinstance(v, (float, np.floating)) else v) for k, v in (metrics or {}).items()},
        degenerate=degenerate,
    )


def _tol(overrides: dict | None, key: str) -> float:
    if overrides and key in overrides:
        return float(overrides[key])
    return DEFAULT_TOLERANCES[key]


def operator_as_element(t: ModuleOperator) -> AlgebraElement:
    """View ``T`` in ``L(A^k) = M_{k n_1} + ... + M_{k n_B}`` for spectral questions."""
    if t.domain != t.codomain:
        raise ValueError("only operators on a single module have a spectrum")
    return AlgebraElement(BlockAlgebra(t.domain.widths), t.blocks)


def scaled_tol(x: ModuleOperator, scale: float, tol: float | None = None) -> float:
    """Rank tolerance for a computed ``X`` whose rounding noise sits at ``eps * scale``.

    Products and differences can be much smaller than the operands they came
    from (``1 - P`` for ``P = 1`` is pure noise); the relative tolerance is
    widened by ``scale / ||X||`` so the cutoff tracks the noise.
    """
    base = x.default_tol() if tol is None else tol
    n = operator_norm(x)
    return base if n == 0.0 else base * max(1.0, scale / n)


def product_tol(product: ModuleOperator, *factors: ModuleOperator, tol: float | None = None) -> float:
    """Rank tolerance for a computed product, widened by its cancellation ratio."""
    return scaled_tol(product, float(np.prod([operator_norm(f) for f in factors])), tol)


def gram_tols(x: ModuleOperator, scale: float | None = None, tol: float | None = None):
    """``(X X*, tol_x, tol_g)`` with matching rank decisions on ``X`` and ``X X*``.

    The singular values of ``X X*`` are the squares of those of ``X``, so a
    relative cutoff ``tau`` on ``X`` corresponds to ``tau^2`` on ``X X*``.
    ``tau`` is raised until ``tau^2`` clears the rounding noise of ``X X*``.
    ``scale`` is the noise scale of ``X`` (its norm by default).
    """
    scale = operator_norm(x) if scale is None else scale
    g = x @ x.adjoint()
    tol_x = max(scaled_tol(x, scale, tol), float(np.sqrt(scaled_tol(g, scale * scale, tol))))
    return g, tol_x, tol_x * tol_x


def _pair_descriptor(*ops: ModuleOperator) -> dict:
    return {
        "algebra": list(ops[0].domain.algebra.block_dims),
        "ranks": [[o.domain.rank, o.codomain.rank] for o in ops],
    }


# -- operator-level results ---------------------------------------------------


def check_penrose(t: ModuleOperator, tol: float | None = None, overrides: dict | None = None) -> VerdictReport:
    """Penrose equations for ``T^+``, ``gamma(T) ||T^+|| = 1`` and ``gamma(T) = gamma(T*)``."""
    x = mp_inverse(t, tol)
    nt = operator_norm(t)
    r = penrose_residuals(t, x)
    tp = _tol(overrides, "penrose")
    residuals = {f"penrose_{i + 1}": v / (1.0 + nt) for i, v in enumerate(r)}
    tols = {k: tp for k in residuals}
    # T^+ T and T T^+ are orthogonal projections; E = Ker(T) + Ran(T^+)
    residuals["projection_xt"] = projection_residual(x @ t)
    residuals["projection_tx"] = projection_residual(t @ x)
    residuals["kernel_complement"] = projection_distance(kernel(t, tol), complement(range_(x, tol)))
    tols["projection_xt"] = tols["projection_tx"] = _tol(overrides, "projection")
    tols["kernel_complement"] = _tol(overrides, "submodule")
    metrics = {"norm": nt, "rank_tol": t.default_tol() if tol is None else tol}
    degenerate = nt == 0.0
    if not degenerate:
        g = gamma(t, tol).value
        g_adj = gamma(t.adjoint(), tol).value
        nx = operator_norm(x)
        residuals["gamma_times_mp_norm"] = abs(g * nx - 1.0)
        residuals["gamma_adjoint"] = abs(g - g_adj)
        residuals["range_gap"] = abs(range_gap(t, tol) - g * g)
        residuals["mp_of_adjoint"] = distance(mp_inverse(t.adjoint(), tol), x.adjoint())
        tols["gamma_times_mp_norm"] = _tol(overrides, "gamma_product")
        tols["gamma_adjoint"] = _tol(overrides, "gamma_adjoint")
        tols["range_gap"] = _tol(overrides, "range_gap")
        tols["mp_of_adjoint"] = _tol(overrides, "mp_adjoint")
        metrics.update(gamma=g, mp_norm=nx)
    return _verdict("penrose", t.descriptor(), residuals, tp, tols, metrics, degenerate)


def check_closed_range_tt(
    t: ModuleOperator,
    rng: np.random.Generator | None = None,
    samples: int = 20,
    tol: float | None = None,
    overrides: dict | None = None,
) -> VerdictReport:
    """``Ran(T) = Ran(T T*)``, kernel/range duality and the bounded-below sample test."""
    ts = _tol(overrides, "submodule")
    tt, tol_x, tol_g = gram_tols(t, tol=tol)
    residuals = {
        "range_tt": projection_distance(range_(t, tol_x), range_(tt, tol_g)),
        "kernel_duality": projection_distance(complement(kernel(t, tol)), range_(t.adjoint(), tol)),
        "range_duality": projection_distance(complement(range_(t, tol)), kernel(t.adjoint(), tol)),
    }
    tols = {}
    metrics = {}
    degenerate = operator_norm(t) == 0.0
    if not degenerate and rng is not None:
        g = gamma(t, tol).value
        perp = complement(kernel(t, tol))
        worst = 0.0
        for _ in range(samples):
            x = perp.random_unit_member(rng)
            worst = max(worst, g - vector_norm(t(x)))
        residuals["bounded_below"] = max(worst, 0.0)
        tols["bounded_below"] = _tol(overrides, "bounded_below")
        metrics["gamma"] = g
    return _verdict("closed_range_tt", t.descriptor(), residuals, ts, tols, metrics, degenerate)


def check_prop_generalized_inverse_transfer(
    t: ModuleOperator, s: ModuleOperator, tol: float | None = None, overrides: dict | None = None
) -> VerdictReport:
    """``S V T`` inverts ``T^+ T S S^+`` and ``S^+ W T^+`` inverts ``T S``.

    ``V = (TS)^+``, ``U = (T^+ T S S^+)^+``, ``P = S S^+``, ``Q = T^+ T`` and
    ``W = P U Q``.
    """
    tg = _tol(overrides, "generalized_inverse")
    ts_ = t @ s
    t_mp, s_mp = mp_inverse(t, tol), mp_inverse(s, tol)
    p = s @ s_mp
    q = t_mp @ t
    middle = q @ p
    tol_ts = product_tol(ts_, t, s, tol=tol)
    v = mp_inverse(ts_, tol_ts)
    svt = s @ v @ t
    r1, r2 = generalized_inverse_residuals(middle, svt)
    u = mp_inverse(middle, product_tol(middle, q, p, tol=tol))
    w = p @ u @ q
    cand = s_mp @ w @ t_mp
    r3, r4 = generalized_inverse_residuals(ts_, cand)
    residuals = {
        "svt_inner": r1,
        "svt_outer": r2,
        "swt_inner": r3,
        "swt_outer": r4,
        # intermediate identities of the construction
        "pwq_equals_w": distance(p @ w @ q, w) / (1.0 + operator_norm(w)),
        "qwp_equals_qp": distance(q @ w @ p, q @ p),
    }
    degenerate = range_(ts_, tol_ts).is_zero
    return _verdict("prop_generalized_inverse_transfer", _pair_descriptor(t, s), residuals, tg, degenerate=degenerate)


def check_mp_of_product_boundedness(
    t: ModuleOperator, s: ModuleOperator, tol: float | None = None, overrides: dict | None = None
) -> VerdictReport:
    """``(TS)^+`` is bounded together with ``Ker(T) + Ran(S)`` being a summand."""
    ts_ = t @ s
    tol_ts = product_tol(ts_, t, s, tol=tol)
    v = mp_inverse(ts_, tol_ts)
    nts = operator_norm(ts_)
    nv = operator_norm(v)
    r = penrose_residuals(ts_, v)
    # TXT - T, XTX - X, (TX)* - TX, (XT)* - XT scale with these products of norms
    scales = (1.0 + nts * nts * nv, 1.0 + nv * nv * nts, 1.0 + nts * nv, 1.0 + nts * nv)
    summand_ii = summand_residual(submodule_sum(kernel(t, tol), range_(s, tol)))
    summand_iii = summand_residual(submodule_sum(kernel(s.adjoint(), tol), range_(t.adjoint(), tol)))
    residuals = {f"penrose_{i + 1}": x / c for i, (x, c) in enumerate(zip(r, scales))}
    residuals["mp_finite"] = 0.0 if np.isfinite(nv) else 1.0
    residuals["summand_ii"] = summand_ii
    residuals["summand_iii"] = summand_iii
    tols = {k: _tol(overrides, "penrose") for k in residuals if k.startswith("penrose")}
    tols["summand_ii"] = tols["summand_iii"] = _tol(overrides, "submodule")
    degenerate = nts == 0.0 or range_(ts_, tol_ts).is_zero
    metrics = {"mp_norm": nv}
    if not degenerate:
        metrics["gamma_ts"] = gamma(ts_, tol_ts).value
    return _verdict(
        "mp_of_product_boundedness", _pair_descriptor(t, s), residuals, _tol(overrides, "condition"),
        tols, metrics, degenerate,
    )


# -- projection identities ------------------------------------------------------


def koliha_residuals(p: ModuleOperator, q: ModuleOperator, lam: complex) -> tuple[float, float]:
    """Raw residuals of the two Koliha-Rakocevic factorizations at ``lam``.

    ``(l-1+P)(l-(P-Q))(l+1-Q) = l(l^2-1+PQ)`` and
    ``(l-1+P)(l-(P+Q))(l-1+Q) = l((l-1)^2-PQ)``.
    """
    one = ModuleOperator.identity(p.domain)
    pq = p @ q
    left = (lam - 1) * one + p
    lhs_diff = left @ (lam * one - (p - q)) @ ((lam + 1) * one - q)
    rhs_diff = lam * ((lam * lam - 1) * one + pq)
    lhs_sum = left @ (lam * one - (p + q)) @ ((lam - 1) * one + q)
    rhs_sum = lam * ((lam - 1) ** 2 * one - pq)
    return distance(lhs_diff, rhs_diff), distance(lhs_sum, rhs_sum)


def check_koliha_identities(
    p: ModuleOperator, q: ModuleOperator, lambdas: Iterable[complex], overrides: dict | None = None
) -> VerdictReport:
    """Both factorizations at every ``lambda``; residuals scaled by ``(1+|lambda|)^3``."""
    require_projection(p, "P")
    require_projection(q, "Q")
    worst_diff = worst_sum = 0.0
    lambdas = list(lambdas)
    for lam in lambdas:
        r_diff, r_sum = koliha_residuals(p, q, lam)
        scale = (1.0 + abs(lam)) ** 3
        worst_diff = max(worst_diff, r_diff / scale)
        worst_sum = max(worst_sum, r_sum / scale)
    return _verdict(
        "koliha_identities",
        _pair_descriptor(p, q),
        {"difference_identity": worst_diff, "sum_identity": worst_sum},
        _tol(overrides, "koliha"),
        metrics={"lambda_count": len(lambdas)},
    )


def _nearest(values: np.ndarray, x: float) -> float:
    return float(np.min(np.abs(values - x))) if values.size else _NO_PARTNER


def spectral_correspondence(p: ModuleOperator, q: ModuleOperator) -> dict:
    """Spectra of ``P+Q`` and ``PQ`` (through ``PQP``) with the correspondence residuals.

    For ``lambda`` outside {0, 1}: ``lambda in sigma(P+Q)`` iff
    ``(lambda-1)^2 in sigma(PQ)``. Each nonzero point ``mu`` of ``sigma(PQ)``
    is matched, with multiplicity, by ``lambda = 1 + sqrt(mu)``; points with
    ``mu < 1`` also have the partner ``1 - sqrt(mu)``.
    """
    lam = np.real(spectrum(operator_as_element(p + q)))
    mu = np.real(spectrum(operator_as_element(p @ q @ p)))
    keep = (np.abs(lam) > SPECTRAL_EXCLUDE) & ((lam - 1.0) ** 2 > SPECTRAL_ZERO)
    lam_kept = lam[keep]
    images = (lam_kept - 1.0) ** 2
    mu_nz = np.sort(mu[mu > SPECTRAL_ZERO])
    forward = max((_nearest(mu_nz, x) for x in images), default=0.0)
    backward = max((_nearest(lam_kept, 1.0 + np.sqrt(x)) for x in mu_nz), default=0.0)
    upper = np.sort(images[lam_kept > 1.0])
    if upper.size == mu_nz.size:
        multiset = float(np.max(np.abs(upper - mu_nz))) if upper.size else 0.0
        count_mismatch = 0.0
    else:
        multiset = _NO_PARTNER
        count_mismatch = float(abs(upper.size - mu_nz.size))
    return {
        "sigma_sum": lam,
        "sigma_product": mu,
        "forward": forward,
        "backward": backward,
        "multiset": multiset,
        "count_mismatch": count_mismatch,
    }


def check_spectral_correspondence(
    p: ModuleOperator, q: ModuleOperator, overrides: dict | None = None
) -> VerdictReport:
    require_projection(p, "P")
    require_projection(q, "Q")
    sc = spectral_correspondence(p, q)
    residuals = {k: sc[k] for k in ("forward", "backward", "multiset", "count_mismatch")}
    # sigma(P), sigma(Q) lie in {0, 1}
    proj_spec = 0.0
    for op in (p, q):
        s = np.real(spectrum(operator_as_element(op)))
        if s.size:
            proj_spec = max(proj_spec, float(np.max(np.minimum(np.abs(s), np.abs(s - 1.0)))))
    residuals["projection_spectrum"] = proj_spec
    return _verdict(
        "spectral_correspondence",
        _pair_descriptor(p, q),
        residuals,
        _tol(overrides, "spectral"),
        tolerances={"projection_spectrum": 1e-8},
        metrics={"matched": int(np.count_nonzero(sc["sigma_product"] > SPECTRAL_ZERO))},
    )


def check_range_sum_identity(
    p: ModuleOperator, q: ModuleOperator, tol: float | None = None, overrides: dict | None = None
) -> VerdictReport:
    """``Ran(1-P+Q) = Ran(1-P) + Ran(Q)``, also through ``T = [[1-P, Q], [0, 0]]`` on ``F + F``."""
    require_projection(p, "P")
    require_projection(q, "Q")
    from .hmod import direct_sum

    one_minus_p = p.one_minus()
    # 1 - P and 1 - P + Q carry rounding noise at the scale of 1 + ||P|| + ||Q||
    noise = 1.0 + operator_norm(p) + operator_norm(q)
    x = one_minus_p + q
    lhs = range_(x, scaled_tol(x, noise, tol))
    rhs = submodule_sum(range_(one_minus_p, scaled_tol(one_minus_p, noise, tol)), range_(q, tol))
    zero = ModuleOperator.zero(p.domain, p.domain)
    big = ModuleOperator.from_operator_matrix([[one_minus_p, q], [zero, zero]])
    gram, tol_big, tol_gram = gram_tols(big, noise, tol)
    ds = direct_sum(p.domain, p.domain)
    residuals = {
        "range_sum": projection_distance(lhs, rhs),
        "block_range_tt": projection_distance(range_(gram, tol_gram), ds.embed_submodule(range_(x, tol_gram))),
        "block_range": projection_distance(range_(big, tol_big), ds.embed_submodule(rhs)),
        "summand": summand_residual(rhs),
    }
    return _verdict("range_sum_identity", _pair_descriptor(p, q), residuals, _tol(overrides, "submodule"))


COMMUTING_CONDITIONS = (
    "commute",
    "product_is_intersection_projection",
    "product_is_projection",
    "complement_m_commutes_with_n",
    "complement_n_commutes_with_m",
    "complements_commute",
    "m_splits_along_n",
)


def commuting_condition_residuals(p: ModuleOperator, q: ModuleOperator, tol: float | None = None) -> dict:
    """Residual of each of the seven equivalent commutation conditions for ``P_M``, ``P_N``."""
    m, n = range_(p, tol), range_(q, tol)
    mc, nc = complement(m), complement(n)
    p_mc, p_nc = mc.projection(), nc.projection()
    pq = p @ q
    split = submodule_sum(intersect(m, n), intersect(m, nc))
    return {
        "commute": distance(pq, q @ p),
        "product_is_intersection_projection": distance(pq, intersect(m, n).projection()),
        "product_is_projection": projection_residual(pq),
        "complement_m_commutes_with_n": distance(p_mc @ q, q @ p_mc),
        "complement_n_commutes_with_m": distance(p_nc @ p, p @ p_nc),
        "complements_commute": distance(p_mc @ p_nc, p_nc @ p_mc),
        "m_splits_along_n": projection_distance(m, split),
    }


def check_commuting_projections(
    p: ModuleOperator, q: ModuleOperator, tol: float | None = None, overrides: dict | None = None
) -> VerdictReport:
    """The seven commutation conditions agree, and so do the three subset conditions."""
    require_projection(p, "P")
    require_projection(q, "Q")
    tc = _tol(overrides, "condition")
    res = commuting_condition_residuals(p, q, tol)
    truth = {k: res[k] <= tc for k in COMMUTING_CONDITIONS}
    agree = len(set(truth.values())) == 1
    m, n = range_(p, tol), range_(q, tol)
    subset_truth = (
        distance(p @ q, p) <= tc,
        distance(q @ p, p) <= tc,
        m.is_subset(n, tc),
    )
    metrics = {f"residual_{k}": v for k, v in res.items()}
    metrics["all_true"] = all(truth.values())
    metrics["subset"] = subset_truth[2]
    return _verdict(
        "commuting_projections",
        _pair_descriptor(p, q),
        {"disagreement": 0.0 if agree else 1.0, "subset_disagreement": 0.0 if len(set(subset_truth)) == 1 else 1.0},
        tc,
        metrics=metrics,
    )


# -- main theorem, angles and the gamma(PQ) inequality --------------------------


def check_theorem_equivalences(
    t: ModuleOperator, s: ModuleOperator, tol: float | None = None, overrides: dict | None = None
) -> VerdictReport:
    """(i) ``TS`` closed range, (ii) ``Ker(T)+Ran(S)`` and (iii) ``Ker(S*)+Ran(T*)`` summands.

    (i) is read through ``Ran(TS) = Ran(TS (TS)*)`` and a positive range gap
    (or ``TS = 0``). The sufficient angle condition is also evaluated.
    """
    tc = _tol(overrides, "condition")
    ts_ = t @ s
    sum_ii = submodule_sum(kernel(t, tol), range_(s, tol))
    sum_iii = submodule_sum(kernel(s.adjoint(), tol), range_(t.adjoint(), tol))
    tol_ts = product_tol(ts_, t, s, tol=tol)
    tts, tol_x, tol_g = gram_tols(ts_, operator_norm(t) * operator_norm(s), tol)
    zero_ts = range_(ts_, tol_ts).is_zero
    gap = range_gap(ts_, tol_g)
    lemma_raw = projection_distance(range_(ts_, tol_x), range_(tts, tol_g))
    # subspace perturbation grows like ||T|| ||S|| / gamma(TS); compare relative to it
    kappa = 1.0 if zero_ts or gap == 0.0 else max(1.0, operator_norm(t) * operator_norm(s) / np.sqrt(gap))
    lemma_tt = lemma_raw / kappa
    cond_i = zero_ts or (gap > 0.0 and lemma_tt <= _tol(overrides, "submodule"))
    cond_ii = is_orthogonal_summand(sum_ii, _tol(overrides, "submodule"))
    cond_iii = is_orthogonal_summand(sum_iii, _tol(overrides, "submodule"))
    # the same sums seen through P = T^+ T and Q = S S^+
    p = mp_inverse(t, tol) @ t
    q = s @ mp_inverse(s, tol)
    ident_ii = projection_distance(submodule_sum(kernel(p, tol), range_(q, tol)), sum_ii)
    ident_iii = projection_distance(submodule_sum(kernel(q, tol), range_(p, tol)), sum_iii)
    c0 = dixmier_cosine(m_submodule(t, s, tol), range_(s, tol)).cosine
    sufficient_holds = cond_i or not (c0 < 1.0 and cond_iii)
    residuals = {
        "disagreement": 0.0 if cond_i == cond_ii == cond_iii else 1.0,
        "sufficient_condition": 0.0 if sufficient_holds else 1.0,
        "kernel_range_identification_ii": ident_ii,
        "kernel_range_identification_iii": ident_iii,
        "closed_range_tt": lemma_tt,
    }
    tols = {k: _tol(overrides, "submodule") for k in residuals if k != "disagreement" and k != "sufficient_condition"}
    metrics = {
        "closed_range": cond_i,
        "summand_ii": cond_ii,
        "summand_iii": cond_iii,
        "c0": c0,
        "range_gap": gap,
        "closed_range_tt_raw": lemma_raw,
        "condition_number": kappa,
    }
    return _verdict("theorem_equivalences", _pair_descriptor(t, s), residuals, tc, tols, metrics, degenerate=zero_ts)


def check_angle_identity(
    t: ModuleOperator, s: ModuleOperator, tol: float | None = None, overrides: dict | None = None
) -> VerdictReport:
    """``||(1-P) Q R|| = c_0(M, Ran(S))`` for ``P = T^+ T``, ``Q = S S^+``."""
    ta = _tol(overrides, "angle")
    if operator_norm(t) == 0.0 or operator_norm(s) == 0.0:
        return _verdict("angle_identity", _pair_descriptor(t, s), {}, ta, degenerate=True)
    ai = angle_identity(t, s, tol)
    p = mp_inverse(t, tol) @ t
    q = s @ mp_inverse(s, tol)
    r = r_projection(p, q, tol)
    m = m_submodule(t, s, tol)
    residuals = {
        "angle_identity": ai.residual,
        "r_commutes_with_q": r_commutation_residual(q, r),
        # (1-P)R is the projection onto M
        "one_minus_p_r_is_pm": distance(p.one_minus() @ r, m.projection()),
    }
    tols = {"r_commutes_with_q": _tol(overrides, "projection"), "one_minus_p_r_is_pm": _tol(overrides, "submodule")}
    return _verdict(
        "angle_identity", _pair_descriptor(t, s), residuals, ta, tols, {"lhs": ai.lhs, "c0": ai.rhs}
    )


def check_inequality(
    p: ModuleOperator,
    q: ModuleOperator,
    rng: np.random.Generator | None = None,
    samples: int = 20,
    tol: float | None = None,
    overrides: dict | None = None,
) -> VerdictReport:
    """``gamma(PQ)^2 + ||(1-P)QR||^2 >= 1``, the ``delta < 1`` corollary and the sampled hint bound."""
    td = _tol(overrides, "defect")
    try:
        d = inequality_defect(p, q, tol)
    except ZeroProduct:
        return _verdict("inequality", _pair_descriptor(p, q), {}, td, degenerate=True)
    r = r_projection(p, q, tol)
    residuals = {
        "defect_below_zero": max(0.0, -d.defect),
        "corollary": max(0.0, 1.0 - d.delta ** 2 - d.gamma_pq ** 2) if d.delta < 1.0 else 0.0,
        "r_commutes_with_q": r_commutation_residual(q, r),
        # Ker(PQ)^perp = Ran(QR)
        "kernel_perp_is_ran_qr": projection_distance(complement(kernel(p @ q, tol)), range_(q @ r, tol)),
    }
    tols = {"r_commutes_with_q": _tol(overrides, "projection"), "kernel_perp_is_ran_qr": _tol(overrides, "submodule")}
    if rng is not None:
        perp = complement(kernel(p @ q, tol))
        worst = -np.inf
        for _ in range(samples):
            x = perp.random_unit_member(rng)
            lhs = d.gamma_pq ** 2 + vector_norm(p.one_minus()(q(x))) ** 2
            rhs = vector_norm(p(x)) ** 2 + vector_norm(p.one_minus()(x)) ** 2
            worst = max(worst, lhs - rhs)
        residuals["hint_bound"] = max(0.0, worst)
    metrics = {"gamma_pq": d.gamma_pq, "delta": d.delta, "defect": d.defect}
    return _verdict("inequality", _pair_descriptor(p, q), residuals, td, tols, metrics)


# -- independent subspace oracle ------------------------------------------------


def check_subspace_oracle(
    t: ModuleOperator, s: ModuleOperator, tol: float | None = None, overrides: dict | None = None
) -> VerdictReport:
    """Kernel, range, sum and intersection against the row-reduction oracle, block by block."""
    ts = _tol(overrides, "submodule")
    k, rs = kernel(t, tol), range_(s, tol)
    ours = {
        "kernel": k,
        "range": range_(t, tol),
        "sum": submodule_sum(k, rs),
        "intersection": intersect(k, rs),
    }
    mismatches = {name: 0 for name in ours}
    for i in range(t.domain.algebra.num_blocks):
        ko = oracle.kernel_basis(t.blocks[i])
        ro_t = oracle.range_basis(t.blocks[i])
        ro_s = oracle.range_basis(s.blocks[i])
        theirs = {
            "kernel": ko,
            "range": ro_t,
            "sum": oracle.sum_basis(ko, ro_s),
            "intersection": oracle.intersection_basis(ko, ro_s),
        }
        for name, sub in ours.items():
            if not oracle.same_subspace(theirs[name], sub.bases[i], ts):
                mismatches[name] += 1
    return _verdict(
        "subspace_oracle",
        _pair_descriptor(t, s),
        {f"{k}_mismatch": float(v) for k, v in mismatches.items()},
        0.0,
        metrics={"dims": {name: list(sub.dims) for name, sub in ours.items()}},
    )


def summarize(reports: Sequence[VerdictReport]) -> dict:
    """Aggregate trial reports in the given order (callers sort by trial index)."""
    out = {"trials": len(reports), "passed": 0, "failed": 0, "degenerate": 0, "max_residual": {}}
    for r in reports:
        if r.degenerate:
            out["degenerate"] += 1
        elif r.passed:
            out["passed"] += 1
        else:
            out["failed"] += 1
        for k, v in r.residuals.items():
            if k not in out["max_residual"] or v > out["max_residual"][k]:
                out["max_residual"][k] = v
    return out
