"""Finite-dimensional C*-algebras ``A = M_{n_1}(C) + ... + M_{n_B}(C)``.

An element is a tuple of square blocks. Everything is computed blockwise;
the C*-norm is the largest block spectral norm.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import matkit
from .errors import AlgebraMismatch, InvalidInput, NotSupported

NORMAL_TOL = 1e-10


@dataclass(frozen=True)
class BlockAlgebra:
    block_dims: tuple[int, ...]

    def __post_init__(self):
        dims = tuple(int(n) for n in self.block_dims)
        if not dims or any(n < 1 for n in dims):
            raise InvalidInput(f"block dims must be a nonempty list of positive counts, got {self.block_dims!r}")
        object.__setattr__(self, "block_dims", dims)

    @property
    def num_blocks(self) -> int:
        return len(self.block_dims)

    @property
    def dimension(self) -> int:
        """Complex dimension of the algebra, sum of n_i^2."""
        return sum(n * n for n in self.block_dims)

    def descriptor(self) -> str:
        return "-".join(str(n) for n in self.block_dims)

    def element(self, blocks) -> "AlgebraElement":
        return AlgebraElement(self, tuple(matkit.as_cmatrix(b) for b in blocks))

    def identity(self) -> "AlgebraElement":
        return AlgebraElement(self, tuple(np.eye(n, dtype=complex) for n in self.block_dims))

    def zero(self) -> "AlgebraElement":
        return AlgebraElement(self, tuple(np.zeros((n, n), dtype=complex) for n in self.block_dims))

    def scalar(self, c: complex) -> "AlgebraElement":
        return AlgebraElement(self, tuple(c * np.eye(n, dtype=complex) for n in self.block_dims))

    def random_element(self, rng: np.random.Generator) -> "AlgebraElement":
        return AlgebraElement(
            self,
            tuple(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)) for n in self.block_dims),
        )


@dataclass(frozen=True, eq=False)
class AlgebraElement:
    algebra: BlockAlgebra
    blocks: tuple[np.ndarray, ...]

    def __post_init__(self):
        if len(self.blocks) != self.algebra.num_blocks:
            raise InvalidInput("number of blocks does not match the algebra")
        for n, b in zip(self.algebra.block_dims, self.blocks):
            if b.shape != (n, n):
                raise InvalidInput(f"block of shape {b.shape} where ({n}, {n}) was expected")

    def _check(self, other: "AlgebraElement"):
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        if other.algebra != self.algebra:
            raise AlgebraMismatch(f"{self.algebra.block_dims} vs {other.algebra.block_dims}")
        return None

    def __add__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return AlgebraElement(self.algebra, tuple(a + b for a, b in zip(self.blocks, other.blocks)))

    def __sub__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return AlgebraElement(self.algebra, tuple(a - b for a, b in zip(self.blocks, other.blocks)))

    def __neg__(self):
        return AlgebraElement(self.algebra, tuple(-a for a in self.blocks))

    def __mul__(self, c):
        if isinstance(c, AlgebraElement):
            return multiply(self, c)
        return AlgebraElement(self.algebra, tuple(c * a for a in self.blocks))

    __rmul__ = __mul__

    def __matmul__(self, other):
        return multiply(self, other)

    @property
    def H(self) -> "AlgebraElement":
        return adjoint(self)

    def norm(self) -> float:
        return norm(self)

    def allclose(self, other: "AlgebraElement", atol: float = 1e-10) -> bool:
        return norm(self - other) <= atol


def multiply(a: AlgebraElement, b: AlgebraElement) -> AlgebraElement:
    a._check(b)
    return AlgebraElement(a.algebra, tuple(x @ y for x, y in zip(a.blocks, b.blocks)))


def add(a: AlgebraElement, b: AlgebraElement) -> AlgebraElement:
    return a + b


def scale(a: AlgebraElement, c: complex) -> AlgebraElement:
    return a * c


def adjoint(a: AlgebraElement) -> AlgebraElement:
    return AlgebraElement(a.algebra, tuple(matkit.conj_t(x) for x in a.blocks))


def norm(a: AlgebraElement) -> float:
    return max(matkit.spectral_norm(b) for b in a.blocks)


def is_hermitian(a: AlgebraElement, tol: float = NORMAL_TOL) -> bool:
    return norm(a - adjoint(a)) <= tol * max(norm(a), 1.0)


def is_normal(a: AlgebraElement, tol: float = NORMAL_TOL) -> bool:
    aa = adjoint(a)
    return norm(a @ aa - aa @ a) <= tol * max(norm(a) ** 2, 1.0)


def spectrum(a: AlgebraElement, tol: float = NORMAL_TOL) -> np.ndarray:
    """Eigenvalues of a normal element, as the union over blocks (with multiplicity).

    Hermitian elements go straight to the Hermitian eigensolver. For other
    normal elements the Hermitian and skew-Hermitian parts commute, so the
    eigenvectors of a generic real combination of the two diagonalize both.
    """
    if not is_normal(a, tol):
        raise NotSupported("spectrum is only implemented for normal elements")
    out = []
    for b in a.blocks:
        re = 0.5 * (b + matkit.conj_t(b))
        im = (b - matkit.conj_t(b)) / 2j
        if matkit.spectral_norm(im) <= tol * max(matkit.spectral_norm(b), 1.0):
            out.append(matkit.hermitian_eig(re)[0].astype(complex))
            continue
        # irrational weight so that distinct (re, im) pairs stay distinct
        _, v = matkit.hermitian_eig(re + (np.sqrt(2.0) - 1.0) * im)
        lam_re = np.real(np.einsum("ji,jk,ki->i", v.conj(), re, v))
        lam_im = np.real(np.einsum("ji,jk,ki->i", v.conj(), im, v))
        out.append(lam_re + 1j * lam_im)
    vals = np.concatenate(out) if out else np.zeros(0, dtype=complex)
    return vals[np.lexsort((vals.imag, vals.real))]


def spectral_gap_above_zero(a: AlgebraElement, tol: float | None = None) -> float:
    """Smallest nonzero ``|lambda|`` in the spectrum, 0.0 if the spectrum is {0}.

    This is the finite-dimensional stand-in for ``0 not in acc sigma(a)``.
    """
    lam = np.abs(spectrum(a))
    if lam.size == 0:
        return 0.0
    top = float(lam.max())
    if tol is None:
        tol = matkit.default_rank_tol((max(a.algebra.block_dims),) * 2)
    nz = lam[lam > tol * top]
    return float(nz.min()) if nz.size else 0.0


def is_positive(a: AlgebraElement, tol: float = 1e-10) -> bool:
    if not is_hermitian(a, tol):
        return False
    scale_ = norm(a)
    for b in a.blocks:
        w, _ = matkit.hermitian_eig(b, tol=max(tol, matkit.HERMITIAN_TOL))
        if w.size and w[0] < -tol * scale_:
            return False
    return True
