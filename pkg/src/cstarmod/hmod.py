"""The free Hilbert A-module ``A^k`` and its closed submodules.

A vector ``x = (x_1, ..., x_k)`` is stored per block ``i`` as the flattening
``X_i = [x_1^(i) ... x_k^(i)]`` of shape ``n_i x (k n_i)``. The A-valued inner
product is ``<x, y>_i = X_i Y_i^H`` and the left action is ``a.x -> A_i X_i``.

Left A-multiples of a set of generators span, in block ``i``, exactly the
complex row space of the generators' flattenings. A closed submodule is
therefore stored as one complex subspace ``V_i`` of ``C^{k n_i}`` per block,
held as an orthonormal-row basis, and all set operations reduce to subspace
arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import TYPE_CHECKING, Sequence

import numpy as np

from . import matkit
from .cstar import AlgebraElement, BlockAlgebra
from .errors import AlgebraMismatch, InvalidInput, SpaceMismatch

if TYPE_CHECKING:
    from .modop import ModuleOperator

SUBMODULE_TOL = 1e-8
BASIS_TOL = 1e-10


@dataclass(frozen=True)
class ModuleSpace:
    algebra: BlockAlgebra
    rank: int

    def __post_init__(self):
        if int(self.rank) < 1:
            raise InvalidInput(f"module rank must be >= 1, got {self.rank}")
        object.__setattr__(self, "rank", int(self.rank))

    def block_width(self, i: int) -> int:
        return self.rank * self.algebra.block_dims[i]

    @property
    def widths(self) -> tuple[int, ...]:
        return tuple(self.rank * n for n in self.algebra.block_dims)

    @property
    def complex_dimension(self) -> int:
        """Complex dimension of the row spaces, sum of k n_i (one row per block)."""
        return sum(self.widths)

    def descriptor(self) -> dict:
        return {"algebra": list(self.algebra.block_dims), "rank": self.rank}

    def zero(self) -> "ModuleVector":
        return ModuleVector(
            self, tuple(np.zeros((n, self.rank * n), dtype=complex) for n in self.algebra.block_dims)
        )

    def vector(self, blocks) -> "ModuleVector":
        return ModuleVector(self, tuple(matkit.as_cmatrix(b) for b in blocks))

    def from_coordinates(self, coords: Sequence[AlgebraElement]) -> "ModuleVector":
        """Build ``(a_1, ..., a_k)`` from k algebra elements."""
        if len(coords) != self.rank:
            raise InvalidInput(f"expected {self.rank} coordinates, got {len(coords)}")
        for c in coords:
            if c.algebra != self.algebra:
                raise AlgebraMismatch("coordinate from a different algebra")
        return ModuleVector(
            self,
            tuple(np.hstack([c.blocks[i] for c in coords]) for i in range(self.algebra.num_blocks)),
        )

    def generator(self, j: int) -> "ModuleVector":
        """The standard generator ``e_j`` (identity in coordinate j, zero elsewhere)."""
        coords = [self.algebra.zero()] * self.rank
        coords[j] = self.algebra.identity()
        return self.from_coordinates(coords)

    def random_vector(self, rng: np.random.Generator) -> "ModuleVector":
        return ModuleVector(
            self,
            tuple(
                rng.standard_normal((n, self.rank * n)) + 1j * rng.standard_normal((n, self.rank * n))
                for n in self.algebra.block_dims
            ),
        )

    def full(self) -> "Submodule":
        return Submodule(self, tuple(np.eye(w, dtype=complex) for w in self.widths))

    def zero_submodule(self) -> "Submodule":
        return Submodule(self, tuple(np.zeros((0, w), dtype=complex) for w in self.widths))


@dataclass(frozen=True, eq=False)
class ModuleVector:
    space: ModuleSpace
    blocks: tuple[np.ndarray, ...]

    def __post_init__(self):
        alg = self.space.algebra
        if len(self.blocks) != alg.num_blocks:
            raise InvalidInput("number of blocks does not match the algebra")
        for n, b in zip(alg.block_dims, self.blocks):
            if b.shape != (n, self.space.rank * n):
                raise InvalidInput(f"vector block of shape {b.shape}, expected ({n}, {self.space.rank * n})")

    def _same(self, other: "ModuleVector"):
        if other.space != self.space:
            raise SpaceMismatch(f"{self.space.descriptor()} vs {other.space.descriptor()}")

    def __add__(self, other: "ModuleVector") -> "ModuleVector":
        self._same(other)
        return ModuleVector(self.space, tuple(a + b for a, b in zip(self.blocks, other.blocks)))

    def __sub__(self, other: "ModuleVector") -> "ModuleVector":
        self._same(other)
        return ModuleVector(self.space, tuple(a - b for a, b in zip(self.blocks, other.blocks)))

    def __mul__(self, c: complex) -> "ModuleVector":
        return ModuleVector(self.space, tuple(c * a for a in self.blocks))

    __rmul__ = __mul__

    def left_multiply(self, a: AlgebraElement) -> "ModuleVector":
        if a.algebra != self.space.algebra:
            raise AlgebraMismatch("algebra element from a different algebra")
        return ModuleVector(self.space, tuple(ab @ xb for ab, xb in zip(a.blocks, self.blocks)))

    def coordinate(self, j: int) -> AlgebraElement:
        alg = self.space.algebra
        return AlgebraElement(alg, tuple(b[:, j * n : (j + 1) * n] for n, b in zip(alg.block_dims, self.blocks)))

    def norm(self) -> float:
        return vector_norm(self)

    def normalized(self) -> "ModuleVector":
        nv = vector_norm(self)
        if nv == 0.0:
            raise InvalidInput("cannot normalize the zero vector")
        return self * (1.0 / nv)


def inner_product(x: ModuleVector, y: ModuleVector) -> AlgebraElement:
    x._same(y)
    return AlgebraElement(x.space.algebra, tuple(xb @ matkit.conj_t(yb) for xb, yb in zip(x.blocks, y.blocks)))


def vector_norm(x: ModuleVector) -> float:
    return max(matkit.spectral_norm(b) for b in x.blocks)


@dataclass(frozen=True, eq=False)
class Submodule:
    """Closed submodule of ``A^k``; ``bases[i]`` has orthonormal rows spanning ``V_i``."""

    space: ModuleSpace
    bases: tuple[np.ndarray, ...]

    def __post_init__(self):
        for w, b in zip(self.space.widths, self.bases):
            if b.ndim != 2 or b.shape[1] != w:
                raise InvalidInput(f"basis of shape {b.shape} for block width {w}")
        if len(self.bases) != self.space.algebra.num_blocks:
            raise InvalidInput("number of bases does not match the algebra")

    @classmethod
    def from_rows(cls, space: ModuleSpace, rows: Sequence[np.ndarray], tol: float = BASIS_TOL) -> "Submodule":
        """Submodule whose block-i subspace is the row space of ``rows[i]``."""
        rows = [matkit.as_cmatrix(r) if np.size(r) else np.zeros((0, w), dtype=complex)
                for r, w in zip(rows, space.widths)]
        scale = max((matkit.spectral_norm(r) for r in rows if r.size), default=0.0)
        cutoff = tol * max(space.widths) * scale
        return cls(space, tuple(matkit.row_space(r, cutoff) for r in rows))

    @cached_property
    def projection_matrices(self) -> tuple[np.ndarray, ...]:
        return tuple(matkit.conj_t(b) @ b for b in self.bases)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(b.shape[0] for b in self.bases)

    @property
    def is_zero(self) -> bool:
        return all(d == 0 for d in self.dims)

    def _same(self, other: "Submodule"):
        if other.space != self.space:
            raise SpaceMismatch(f"{self.space.descriptor()} vs {other.space.descriptor()}")

    def contains(self, x: ModuleVector, tol: float = SUBMODULE_TOL) -> bool:
        return membership_residual(self, x) <= tol * max(1.0, vector_norm(x))

    def projection(self) -> "ModuleOperator":
        return projection_onto(self)

    def distance(self, other: "Submodule") -> float:
        return projection_distance(self, other)

    def equals(self, other: "Submodule", tol: float = SUBMODULE_TOL) -> bool:
        return projection_distance(self, other) <= tol

    def is_subset(self, other: "Submodule", tol: float = SUBMODULE_TOL) -> bool:
        self._same(other)
        return all(
            b.shape[0] == 0 or matkit.spectral_norm(b - b @ p) <= tol
            for b, p in zip(self.bases, other.projection_matrices)
        )

    def random_member(self, rng: np.random.Generator) -> ModuleVector:
        alg = self.space.algebra
        blocks = []
        for n, b in zip(alg.block_dims, self.bases):
            c = rng.standard_normal((n, b.shape[0])) + 1j * rng.standard_normal((n, b.shape[0]))
            blocks.append(c @ b)
        return ModuleVector(self.space, tuple(blocks))

    def random_unit_member(self, rng: np.random.Generator) -> ModuleVector:
        """A random member of norm one; raises for the zero submodule."""
        if self.is_zero:
            raise InvalidInput("the zero submodule has no unit vectors")
        return self.random_member(rng).normalized()


def membership_residual(m: Submodule, x: ModuleVector) -> float:
    if x.space != m.space:
        raise SpaceMismatch("vector and submodule live in different spaces")
    return max(
        (matkit.spectral_norm(xb - xb @ p) for xb, p in zip(x.blocks, m.projection_matrices)),
        default=0.0,
    )


def projection_distance(m: Submodule, n: Submodule) -> float:
    """``||P_M - P_N||``, the submodule equality metric."""
    m._same(n)
    return max(matkit.spectral_norm(p - q) for p, q in zip(m.projection_matrices, n.projection_matrices))


def span(generators: Sequence[ModuleVector], space: ModuleSpace | None = None, tol: float = BASIS_TOL) -> Submodule:
    """Closed submodule generated by ``generators``; the empty list gives the zero submodule."""
    if not generators:
        if space is None:
            raise InvalidInput("span of an empty list needs an explicit space")
        return space.zero_submodule()
    space = space or generators[0].space
    for g in generators:
        if g.space != space:
            raise SpaceMismatch("generators live in different spaces")
    rows = [np.vstack([g.blocks[i] for g in generators]) for i in range(space.algebra.num_blocks)]
    return Submodule.from_rows(space, rows, tol)


def complement(m: Submodule) -> Submodule:
    return Submodule(m.space, tuple(matkit.row_complement(b) for b in m.bases))


def submodule_sum(m: Submodule, n: Submodule, tol: float = BASIS_TOL) -> Submodule:
    m._same(n)
    rows = [np.vstack([a, b]) for a, b in zip(m.bases, n.bases)]
    # bases are orthonormal, so the cutoff is on an absolute unit scale
    cutoff = tol * max(m.space.widths)
    return Submodule(m.space, tuple(matkit.row_space(r, cutoff) for r in rows))


def intersect(m: Submodule, n: Submodule, tol: float = BASIS_TOL) -> Submodule:
    """``M cap N`` computed as ``(M^perp + N^perp)^perp``."""
    return complement(submodule_sum(complement(m), complement(n), tol))


def summand_residual(m: Submodule) -> float:
    """``max_i || P_{V_i} + P_{V_i^perp} - 1 ||``, plus 1.0 for every dimension defect."""
    comp = complement(m)
    res = 0.0
    for w, b, c, p, q in zip(m.space.widths, m.bases, comp.bases, m.projection_matrices, comp.projection_matrices):
        if b.shape[0] + c.shape[0] != w:
            res += 1.0
        res = max(res, matkit.spectral_norm(p + q - np.eye(w)))
    return res


def is_orthogonal_summand(m: Submodule, tol: float = SUBMODULE_TOL) -> bool:
    """Literal check of ``F = M + M^perp``; always true for submodules of ``A^k`` here."""
    return summand_residual(m) <= tol


def projection_onto(m: Submodule) -> "ModuleOperator":
    from .modop import ModuleOperator

    return ModuleOperator(m.space, m.space, m.projection_matrices)


@dataclass(frozen=True)
class DirectSum:
    """``E (+) F`` with its canonical embeddings and coordinate projections."""

    first: ModuleSpace
    second: ModuleSpace
    space: ModuleSpace

    def pair(self, x: ModuleVector, y: ModuleVector) -> ModuleVector:
        if x.space != self.first or y.space != self.second:
            raise SpaceMismatch("components do not match the summands")
        return ModuleVector(self.space, tuple(np.hstack([a, b]) for a, b in zip(x.blocks, y.blocks)))

    def embed_first(self) -> "ModuleOperator":
        return self._inclusion(first=True)

    def embed_second(self) -> "ModuleOperator":
        return self._inclusion(first=False)

    def project_first(self) -> "ModuleOperator":
        return self.embed_first().adjoint()

    def project_second(self) -> "ModuleOperator":
        return self.embed_second().adjoint()

    def embed_submodule(self, m: Submodule) -> Submodule:
        """``L -> L (+) {0}``."""
        if m.space != self.first:
            raise SpaceMismatch("submodule is not in the first summand")
        return Submodule(
            self.space,
            tuple(np.hstack([b, np.zeros((b.shape[0], self.second.block_width(i)), dtype=complex)])
                  for i, b in enumerate(m.bases)),
        )

    def _inclusion(self, first: bool) -> "ModuleOperator":
        from .modop import ModuleOperator

        src = self.first if first else self.second
        blocks = []
        for i in range(src.algebra.num_blocks):
            wa, wb = self.first.block_width(i), self.second.block_width(i)
            w = wa if first else wb
            mat = np.zeros((w, wa + wb), dtype=complex)
            if first:
                mat[:, :wa] = np.eye(wa)
            else:
                mat[:, wa:] = np.eye(wb)
            blocks.append(mat)
        return ModuleOperator(src, self.space, tuple(blocks))


def direct_sum(e: ModuleSpace, f: ModuleSpace) -> DirectSum:
    if e.algebra != f.algebra:
        raise AlgebraMismatch(f"{e.algebra.block_dims} vs {f.algebra.block_dims}")
    return DirectSum(e, f, ModuleSpace(e.algebra, e.rank + f.rank))
