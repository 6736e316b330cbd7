"""Bounded adjointable operators ``A^k -> A^m``.

An operator acts on flattened vectors by right multiplication,
``(T x)_i = X_i B_i`` with ``B_i`` of shape ``(k n_i) x (m n_i)``. Right
multiplication commutes with the left A-action, so every such map is
A-linear, and the adjoint is the blockwise conjugate transpose.

Because the matrices act from the right, the operator product ``T S``
(apply ``S`` first) has block matrices ``B_S @ B_T``. Use ``t @ s`` or
``compose(t, s)`` and never multiply block matrices by hand.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import matkit
from .hmod import ModuleSpace, ModuleVector, Submodule, submodule_sum
from .errors import InvalidInput, NotAProjection, NotInnerInverse, SpaceMismatch, ZeroOperator

RANK_TOL = matkit.RANK_TOL_FACTOR
PROJECTION_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class ModuleOperator:
    domain: ModuleSpace
    codomain: ModuleSpace
    blocks: tuple[np.ndarray, ...]

    def __post_init__(self):
        if self.domain.algebra != self.codomain.algebra:
            raise SpaceMismatch("domain and codomain are modules over different algebras")
        if len(self.blocks) != self.domain.algebra.num_blocks:
            raise InvalidInput("number of blocks does not match the algebra")
        for i, b in enumerate(self.blocks):
            want = (self.domain.block_width(i), self.codomain.block_width(i))
            if b.shape != want:
                raise InvalidInput(f"operator block {i} has shape {b.shape}, expected {want}")

    # -- constructors -------------------------------------------------------

    @classmethod
    def identity(cls, space: ModuleSpace) -> "ModuleOperator":
        return cls(space, space, tuple(np.eye(w, dtype=complex) for w in space.widths))

    @classmethod
    def zero(cls, domain: ModuleSpace, codomain: ModuleSpace) -> "ModuleOperator":
        return cls(
            domain,
            codomain,
            tuple(np.zeros((a, b), dtype=complex) for a, b in zip(domain.widths, codomain.widths)),
        )

    @classmethod
    def from_blocks(cls, domain: ModuleSpace, codomain: ModuleSpace, blocks) -> "ModuleOperator":
        return cls(domain, codomain, tuple(matkit.as_cmatrix(b) for b in blocks))

    @classmethod
    def from_operator_matrix(cls, rows: Sequence[Sequence["ModuleOperator"]]) -> "ModuleOperator":
        """Assemble ``[[T_11, T_12], [T_21, T_22], ...]`` acting on a direct sum.

        ``rows[r][c]`` maps the c-th summand of the domain into the r-th
        summand of the codomain, as in ordinary operator-matrix notation.
        """
        ncols = len(rows[0])
        if any(len(r) != ncols for r in rows):
            raise InvalidInput("ragged operator matrix")
        alg = rows[0][0].domain.algebra
        in_spaces = [rows[0][c].domain for c in range(ncols)]
        out_spaces = [r[0].codomain for r in rows]
        for r, row in enumerate(rows):
            for c, t in enumerate(row):
                if t.domain != in_spaces[c] or t.codomain != out_spaces[r]:
                    raise SpaceMismatch(f"entry ({r}, {c}) does not fit the operator matrix")
        domain = ModuleSpace(alg, sum(s.rank for s in in_spaces))
        codomain = ModuleSpace(alg, sum(s.rank for s in out_spaces))
        # right multiplication: input summands index the block rows
        blocks = tuple(
            np.block([[rows[r][c].blocks[i] for r in range(len(rows))] for c in range(ncols)])
            for i in range(alg.num_blocks)
        )
        return cls(domain, codomain, blocks)

    # -- algebra ------------------------------------------------------------

    def __call__(self, x: ModuleVector) -> ModuleVector:
        return apply(self, x)

    def __matmul__(self, other: "ModuleOperator") -> "ModuleOperator":
        return compose(self, other)

    def _same_shape(self, other: "ModuleOperator"):
        if other.domain != self.domain or other.codomain != self.codomain:
            raise SpaceMismatch("operators have different domains or codomains")

    def __add__(self, other: "ModuleOperator") -> "ModuleOperator":
        self._same_shape(other)
        return ModuleOperator(self.domain, self.codomain, tuple(a + b for a, b in zip(self.blocks, other.blocks)))

    def __sub__(self, other: "ModuleOperator") -> "ModuleOperator":
        self._same_shape(other)
        return ModuleOperator(self.domain, self.codomain, tuple(a - b for a, b in zip(self.blocks, other.blocks)))

    def __neg__(self) -> "ModuleOperator":
        return ModuleOperator(self.domain, self.codomain, tuple(-a for a in self.blocks))

    def __mul__(self, c: complex) -> "ModuleOperator":
        return ModuleOperator(self.domain, self.codomain, tuple(c * a for a in self.blocks))

    __rmul__ = __mul__

    def one_minus(self) -> "ModuleOperator":
        """``1 - T`` for an operator on a single space."""
        return ModuleOperator.identity(self.domain) - self

    def adjoint(self) -> "ModuleOperator":
        return adjoint(self)

    @property
    def H(self) -> "ModuleOperator":
        return adjoint(self)

    def norm(self) -> float:
        return operator_norm(self)

    def kernel(self, tol: float | None = None) -> Submodule:
        return kernel(self, tol)

    def range(self, tol: float | None = None) -> Submodule:
        return range_(self, tol)

    def is_zero(self, tol: float = 0.0) -> bool:
        return operator_norm(self) <= tol

    def default_tol(self) -> float:
        return matkit.default_rank_tol((max(self.domain.widths), max(self.codomain.widths)))

    def descriptor(self) -> dict:
        return {
            "algebra": list(self.domain.algebra.block_dims),
            "domain_rank": self.domain.rank,
            "codomain_rank": self.codomain.rank,
        }


def apply(t: ModuleOperator, x: ModuleVector) -> ModuleVector:
    if x.space != t.domain:
        raise SpaceMismatch("vector is not in the operator's domain")
    return ModuleVector(t.codomain, tuple(xb @ b for xb, b in zip(x.blocks, t.blocks)))


def compose(t: ModuleOperator, s: ModuleOperator) -> ModuleOperator:
    """The operator product ``T S`` (apply ``s`` first)."""
    if s.codomain != t.domain:
        raise SpaceMismatch("cannot compose: codomain of the right factor is not the domain of the left")
    return ModuleOperator(s.domain, t.codomain, tuple(bs @ bt for bs, bt in zip(s.blocks, t.blocks)))


def adjoint(t: ModuleOperator) -> ModuleOperator:
    return ModuleOperator(t.codomain, t.domain, tuple(matkit.conj_t(b) for b in t.blocks))


def operator_norm(t: ModuleOperator) -> float:
    return max(matkit.spectral_norm(b) for b in t.blocks)


def distance(t: ModuleOperator, s: ModuleOperator) -> float:
    return operator_norm(t - s)


def _cutoff(t: ModuleOperator, tol: float | None) -> float:
    """Absolute singular-value cutoff, relative to the norm of the whole operator."""
    if tol is None:
        tol = t.default_tol()
    return tol * operator_norm(t)


def kernel(t: ModuleOperator, tol: float | None = None) -> Submodule:
    """``Ker(T)``: per block the rows ``x`` with ``x B_i = 0``."""
    cut = _cutoff(t, tol)
    bases = []
    for b in t.blocks:
        u, s, _ = np.linalg.svd(b, full_matrices=True)
        r = int(np.count_nonzero(s > cut))
        bases.append(matkit.conj_t(u[:, r:]).copy())
    return Submodule(t.domain, tuple(bases))


def range_(t: ModuleOperator, tol: float | None = None) -> Submodule:
    """``Ran(T)``: per block the row space of ``B_i``."""
    cut = _cutoff(t, tol)
    return Submodule(t.codomain, tuple(matkit.row_space(b, cut) for b in t.blocks))


def mp_inverse(t: ModuleOperator, tol: float | None = None) -> ModuleOperator:
    cut = _cutoff(t, tol)
    return ModuleOperator(t.codomain, t.domain, tuple(matkit.pinv(b, atol=cut) for b in t.blocks))


def penrose_residuals(t: ModuleOperator, x: ModuleOperator) -> tuple[float, float, float, float]:
    """Residuals of ``TXT = T``, ``XTX = X``, ``(TX)* = TX`` and ``(XT)* = XT``."""
    tx = t @ x
    xt = x @ t
    return (
        distance(tx @ t, t),
        distance(xt @ x, x),
        distance(adjoint(tx), tx),
        distance(adjoint(xt), xt),
    )


@dataclass(frozen=True)
class GeneralizedInverseCheck:
    passed: bool
    inner_residual: float
    outer_residual: float
    tolerance: float

    def __bool__(self) -> bool:
        return self.passed


def generalized_inverse_residuals(t: ModuleOperator, x: ModuleOperator) -> tuple[float, float]:
    """Backward errors of ``T X T = T`` and ``X T X = X``.

    Each raw residual is divided by the natural rounding scale of the
    triple product, ``1 + ||T||^2 ||X||`` resp. ``1 + ||X||^2 ||T||``.
    """
    if x.domain != t.codomain or x.codomain != t.domain:
        raise SpaceMismatch("candidate does not map the codomain of t back to its domain")
    nt, nx = operator_norm(t), operator_norm(x)
    r1 = distance(t @ x @ t, t) / (1.0 + nt * nt * nx)
    r2 = distance(x @ t @ x, x) / (1.0 + nx * nx * nt)
    return r1, r2


def is_generalized_inverse(t: ModuleOperator, candidate: ModuleOperator, tol: float = 1e-9) -> GeneralizedInverseCheck:
    r1, r2 = generalized_inverse_residuals(t, candidate)
    return GeneralizedInverseCheck(r1 <= tol and r2 <= tol, r1, r2, tol)


def inner_to_generalized(t: ModuleOperator, s_inner: ModuleOperator, tol: float = 1e-9) -> ModuleOperator:
    """Turn an inner inverse ``S`` (``T S T = T``) into the generalized inverse ``S T S``."""
    if s_inner.domain != t.codomain or s_inner.codomain != t.domain:
        raise SpaceMismatch("inner inverse has the wrong shape")
    nt, ns = operator_norm(t), operator_norm(s_inner)
    res = distance(t @ s_inner @ t, t) / (1.0 + nt * nt * ns)
    if res > tol:
        raise NotInnerInverse(f"T S T differs from T by {res:.3e} (relative), tolerance {tol:.1e}")
    return s_inner @ t @ s_inner


@dataclass(frozen=True)
class GammaValue:
    """Reduced minimum modulus and the block where the infimum is attained."""

    value: float
    attained_block: int

    def __float__(self) -> float:
        return self.value


def gamma(t: ModuleOperator, tol: float | None = None) -> GammaValue:
    """Reduced minimum modulus: min over blocks of the smallest nonzero singular value."""
    cut = _cutoff(t, tol)
    best, where = np.inf, -1
    for i, b in enumerate(t.blocks):
        s = matkit.singular_values(b)
        nz = s[s > cut]
        if nz.size and nz[-1] < best:
            best, where = float(nz[-1]), i
    if where < 0:
        raise ZeroOperator("the reduced minimum modulus is only defined for nonzero operators")
    return GammaValue(best, where)


def range_gap(t: ModuleOperator, tol: float | None = None) -> float:
    """Smallest nonzero eigenvalue of ``T T*`` (0.0 for the zero operator)."""
    tt = t @ adjoint(t)
    top = operator_norm(tt)
    if top == 0.0:
        return 0.0
    if tol is None:
        tol = t.default_tol()
    # zero singular values show up as eigenvalues of size ~eps ||T||^2, so the
    # cutoff sits on the eigenvalue scale, not on the squared singular-value scale
    cut = tol * top
    best = np.inf
    for b in tt.blocks:
        if not b.size:
            continue
        w, _ = matkit.hermitian_eig(b)
        nz = w[w > cut]
        if nz.size:
            best = min(best, float(nz[0]))
    return 0.0 if best == np.inf else best


def is_projection(p: ModuleOperator, tol: float = PROJECTION_TOL) -> bool:
    return projection_residual(p) <= tol


def projection_residual(p: ModuleOperator) -> float:
    if p.domain != p.codomain:
        return np.inf
    return max(distance(p, adjoint(p)), distance(p @ p, p))


def require_projection(p: ModuleOperator, name: str = "operator", tol: float = PROJECTION_TOL) -> None:
    res = projection_residual(p)
    if not res <= tol:
        raise NotAProjection(f"{name} is not an orthogonal projection (residual {res:.3e})")


def kernel_range_sum(t: ModuleOperator, s: ModuleOperator, tol: float | None = None) -> Submodule:
    """``Ker(T) + Ran(S)`` inside the middle space of ``T S``."""
    return submodule_sum(kernel(t, tol), range_(s, tol))
