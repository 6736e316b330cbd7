"""Dixmier angles between submodules and the gamma(PQ) inequality defect."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .hmod import Submodule, complement, intersect, projection_onto, submodule_sum
from .errors import SpaceMismatch, ZeroOperator, ZeroProduct
from .modop import (
    PROJECTION_TOL,
    ModuleOperator,
    gamma,
    kernel,
    mp_inverse,
    operator_norm,
    range_,
    require_projection,
)

CLAMP_WINDOW = 1e-12


@dataclass(frozen=True)
class AngleResult:
    cosine: float
    angle_radians: float


def _angle(cosine: float) -> AngleResult:
    if cosine > 1.0 + CLAMP_WINDOW or cosine < -CLAMP_WINDOW:
        # a projection product cannot exceed norm one unless the inputs are broken
        raise ValueError(f"cosine {cosine!r} outside [0, 1] beyond the clamping window")
    c = min(max(cosine, 0.0), 1.0)
    return AngleResult(c, float(np.arccos(c)))


def dixmier_cosine(m: Submodule, n: Submodule) -> AngleResult:
    """``c_0(M, N) = ||P_M P_N||``, the cosine of the minimal angle."""
    if m.space != n.space:
        raise SpaceMismatch("submodules live in different spaces")
    return _angle(operator_norm(projection_onto(m) @ projection_onto(n)))


def sampled_cosine(m: Submodule, n: Submodule, rng: np.random.Generator, samples: int = 1000) -> float:
    """Lower estimate of ``c_0`` from ``sup ||<x, y>||`` over random unit pairs."""
    from .hmod import inner_product

    if m.is_zero or n.is_zero:
        return 0.0
    best = 0.0
    for _ in range(samples):
        x = m.random_unit_member(rng)
        y = n.random_unit_member(rng)
        best = max(best, inner_product(x, y).norm())
    return best


def m_submodule(t: ModuleOperator, s: ModuleOperator, tol: float | None = None) -> Submodule:
    """``M = Ker(T) cap [Ker(T) cap Ran(S)]^perp``."""
    if s.codomain != t.domain:
        raise SpaceMismatch("S must map into the domain of T")
    k = kernel(t, tol)
    return intersect(k, complement(intersect(k, range_(s, tol))))


def r_projection(p: ModuleOperator, q: ModuleOperator, tol: float | None = None) -> ModuleOperator:
    """Orthogonal projection onto ``Ker(Q) + Ran(P)``."""
    require_projection(p, "P")
    require_projection(q, "Q")
    if p.domain != q.domain:
        raise SpaceMismatch("P and Q act on different spaces")
    return projection_onto(submodule_sum(kernel(q, tol), range_(p, tol)))


def r_commutation_residual(q: ModuleOperator, r: ModuleOperator) -> float:
    """max of ``||(1-Q)R - (1-Q)||`` and ``||R(1-Q) - (1-Q)||``."""
    qc = q.one_minus()
    return max(operator_norm(qc @ r - qc), operator_norm(r @ qc - qc))


@dataclass(frozen=True)
class DefectResult:
    gamma_pq: float
    delta: float
    defect: float
    algebra_descriptor: tuple[int, ...]
    tolerances: dict = field(default_factory=dict)


def inequality_defect(
    p: ModuleOperator,
    q: ModuleOperator,
    tol: float | None = None,
    zero_tol: float = 1e-10,
) -> DefectResult:
    """``gamma(PQ)^2 + ||(1-P) Q R||^2 - 1`` for orthogonal projections ``P, Q``.

    ``PQ`` is treated as zero when its norm is at most ``zero_tol``.
    """
    r = r_projection(p, q, tol)
    pq = p @ q
    if operator_norm(pq) <= zero_tol:
        raise ZeroProduct("PQ = 0; the inequality is stated for PQ != 0")
    g = gamma(pq, tol).value
    delta = operator_norm(p.one_minus() @ q @ r)
    return DefectResult(
        gamma_pq=g,
        delta=delta,
        defect=g * g + delta * delta - 1.0,
        algebra_descriptor=p.domain.algebra.block_dims,
        tolerances={
            "rank_tol": p.default_tol() if tol is None else tol,
            "zero_tol": zero_tol,
            "projection_tol": PROJECTION_TOL,
        },
    )


@dataclass(frozen=True)
class AngleIdentity:
    lhs: float
    rhs: float

    @property
    def residual(self) -> float:
        return abs(self.lhs - self.rhs)


def angle_identity(t: ModuleOperator, s: ModuleOperator, tol: float | None = None) -> AngleIdentity:
    """Both sides of ``||(1-P) Q R|| = c_0(M, Ran(S))`` with ``P = T^+ T``, ``Q = S S^+``."""
    if s.codomain != t.domain:
        raise SpaceMismatch("S must map into the domain of T")
    if operator_norm(t) == 0.0 or operator_norm(s) == 0.0:
        raise ZeroOperator("the angle identity needs nonzero T and S")
    p = mp_inverse(t, tol) @ t
    q = s @ mp_inverse(s, tol)
    r = r_projection(p, q, tol)
    lhs = operator_norm(p.one_minus() @ q @ r)
    rhs = dixmier_cosine(m_submodule(t, s, tol), range_(s, tol)).cosine
    return AngleIdentity(lhs, rhs)


def angle_identity_check(t: ModuleOperator, s: ModuleOperator, tol: float | None = None) -> float:
    return angle_identity(t, s, tol).residual
