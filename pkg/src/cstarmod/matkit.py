"""Dense complex matrix kernel.

Matrices are plain ``numpy`` arrays of dtype ``complex128``. Two decomposition
engines are available: LAPACK (through ``numpy.linalg``, the default) and a
pure one-sided / cyclic Jacobi implementation. The Jacobi engine is slower
but computes small singular values to high relative accuracy and serves as
an independent cross-check of the LAPACK path.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInput, NotHermitian

HERMITIAN_TOL = 1e-10
RANK_TOL_FACTOR = 1e-10
_EPS = np.finfo(float).eps


def as_cmatrix(a) -> np.ndarray:
    """Return ``a`` as a finite 2-d complex128 array (no copy when possible)."""
    arr = np.asarray(a, dtype=complex)
    if arr.ndim == 1:
        arr = arr.reshape(1, -1)
    if arr.ndim != 2:
        raise InvalidInput(f"expected a 2-d matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInput("matrix has non-finite entries")
    return arr


def default_rank_tol(shape: tuple[int, int]) -> float:
    return RANK_TOL_FACTOR * max(shape[0], shape[1], 1)


def conj_t(a: np.ndarray) -> np.ndarray:
    return a.conj().T


@dataclass(frozen=True)
class SvdResult:
    """Thin SVD ``a = U diag(s) V^H``; ``s`` is non-increasing."""

    left_vectors: np.ndarray
    singular_values: np.ndarray
    right_vectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return (self.left_vectors * self.singular_values) @ conj_t(self.right_vectors)


def svd(a, method: str = "lapack") -> SvdResult:
    a = as_cmatrix(a)
    if method == "lapack":
        u, s, vh = np.linalg.svd(a, full_matrices=False)
        return SvdResult(u, s, conj_t(vh))
    if method == "jacobi":
        return _jacobi_svd(a)
    raise ValueError(f"unknown svd method {method!r}")


def singular_values(a, method: str = "lapack") -> np.ndarray:
    a = as_cmatrix(a)
    if a.size == 0:
        return np.zeros(0)
    if method == "lapack":
        return np.linalg.svd(a, compute_uv=False)
    return svd(a, method).singular_values


def _complete_columns(u: np.ndarray, ncols_known: int) -> np.ndarray:
    """Replace columns ``ncols_known:`` of ``u`` by an orthonormal completion."""
    m, k = u.shape
    basis = [u[:, j] for j in range(ncols_known)]
    e = np.eye(m, dtype=complex)
    out = u.copy()
    j = ncols_known
    for i in range(m):
        if j >= k:
            break
        v = e[:, i].copy()
        # two passes of Gram-Schmidt keep the completion orthonormal to ~eps
        for _ in range(2):
            for b in basis:
                v -= b * np.vdot(b, v)
        nv = np.linalg.norm(v)
        if nv > 0.5:
            v /= nv
            basis.append(v)
            out[:, j] = v
            j += 1
    return out


def _jacobi_svd(a: np.ndarray, max_sweeps: int = 60) -> SvdResult:
    m, n = a.shape
    if n > m:
        r = _jacobi_svd(conj_t(a), max_sweeps)
        return SvdResult(r.right_vectors, r.singular_values, r.left_vectors)
    w = a.copy()
    v = np.eye(n, dtype=complex)
    for _ in range(max_sweeps):
        rotated = False
        for p in range(n - 1):
            for q in range(p + 1, n):
                wp, wq = w[:, p], w[:, q]
                alpha = np.vdot(wp, wp).real
                beta = np.vdot(wq, wq).real
                g = np.vdot(wp, wq)
                ag = abs(g)
                if ag == 0.0 or ag <= _EPS * np.sqrt(alpha * beta):
                    continue
                rotated = True
                phase = g / ag
                zeta = (beta - alpha) / (2.0 * ag)
                t = (1.0 if zeta >= 0 else -1.0) / (abs(zeta) + np.sqrt(1.0 + zeta * zeta))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = c * t
                # column q is de-phased so that the pair has a real inner product
                bq = wq * np.conj(phase)
                w[:, p], w[:, q] = c * wp - s * bq, (s * wp + c * bq) * phase
                vp, vq = v[:, p], v[:, q] * np.conj(phase)
                v[:, p], v[:, q] = c * vp - s * vq, (s * vp + c * vq) * phase
        if not rotated:
            break
    sv = np.linalg.norm(w, axis=0)
    order = np.argsort(-sv, kind="stable")
    sv = sv[order]
    w = w[:, order]
    v = v[:, order]
    u = np.zeros((m, n), dtype=complex)
    nonzero = int(np.count_nonzero(sv > 0.0))
    u[:, :nonzero] = w[:, :nonzero] / sv[:nonzero]
    if nonzero < n:
        u = _complete_columns(u, nonzero)
    return SvdResult(u, sv, v)


def hermitian_eig(a, method: str = "lapack", tol: float = HERMITIAN_TOL):
    """Eigen-decomposition of a Hermitian matrix, eigenvalues ascending."""
    a = as_cmatrix(a)
    if a.shape[0] != a.shape[1]:
        raise NotHermitian(f"matrix of shape {a.shape} is not square")
    scale = spectral_norm(a)
    if np.linalg.norm(a - conj_t(a), 2) > tol * max(scale, 1e-300):
        raise NotHermitian("matrix is not Hermitian within tolerance")
    h = 0.5 * (a + conj_t(a))
    if method == "lapack":
        return np.linalg.eigh(h)
    if method == "jacobi":
        return _jacobi_eigh(h)
    raise ValueError(f"unknown eig method {method!r}")


def _jacobi_eigh(h: np.ndarray, max_sweeps: int = 60):
    n = h.shape[0]
    a = h.copy()
    v = np.eye(n, dtype=complex)
    for _ in range(max_sweeps):
        off = np.sqrt(np.sum(np.abs(a) ** 2) - np.sum(np.abs(np.diag(a)) ** 2))
        if off <= _EPS * np.linalg.norm(a):
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                mag = abs(apq)
                if mag == 0.0:
                    continue
                phase = apq / mag
                tau = (a[q, q].real - a[p, p].real) / (2.0 * mag)
                t = (1.0 if tau >= 0 else -1.0) / (abs(tau) + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = c * t
                # J = diag(1, conj(phase)) @ [[c, s], [-s, c]] on coordinates (p, q)
                j = np.array([[c, s], [-s * np.conj(phase), c * np.conj(phase)]])
                idx = [p, q]
                a[:, idx] = a[:, idx] @ j
                a[idx, :] = conj_t(j) @ a[idx, :]
                a[p, q] = a[q, p] = 0.0
                v[:, idx] = v[:, idx] @ j
    w = np.diag(a).real.copy()
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]


def spectral_norm(a) -> float:
    a = as_cmatrix(a)
    if a.size == 0:
        return 0.0
    if min(a.shape) == 1:
        return float(np.sqrt(np.sum(a.real ** 2 + a.imag ** 2)))
    return float(np.linalg.svd(a, compute_uv=False)[0])


def rank_cutoff(sv: np.ndarray, tol: float) -> float:
    return tol * (float(sv[0]) if sv.size else 0.0)


def numerical_rank(a, tol: float | None = None) -> int:
    a = as_cmatrix(a)
    if tol is None:
        tol = default_rank_tol(a.shape)
    sv = singular_values(a)
    if sv.size == 0 or sv[0] == 0.0:
        return 0
    return int(np.count_nonzero(sv > rank_cutoff(sv, tol)))


def pinv(a, tol: float | None = None, *, atol: float | None = None) -> np.ndarray:
    """Moore-Penrose inverse.

    Singular values at or below ``tol * sigma_1`` are treated as zero; an
    absolute cutoff ``atol`` takes precedence when given (used by callers that
    decide ranks relative to an outer scale).
    """
    a = as_cmatrix(a)
    if a.size == 0:
        return np.zeros((a.shape[1], a.shape[0]), dtype=complex)
    if tol is None:
        tol = default_rank_tol(a.shape)
    r = svd(a)
    s = r.singular_values
    cutoff = atol if atol is not None else rank_cutoff(s, tol)
    keep = s > cutoff
    if not np.any(keep):
        return np.zeros((a.shape[1], a.shape[0]), dtype=complex)
    u = r.left_vectors[:, keep]
    v = r.right_vectors[:, keep]
    return (v / s[keep]) @ conj_t(u)


def row_space(a: np.ndarray, cutoff: float) -> np.ndarray:
    """Orthonormal rows spanning the row space (singular values > cutoff)."""
    if a.shape[0] == 0:
        return np.zeros((0, a.shape[1]), dtype=complex)
    _, s, vh = np.linalg.svd(a, full_matrices=False)
    return vh[: int(np.count_nonzero(s > cutoff))].copy()


def row_complement(basis: np.ndarray) -> np.ndarray:
    """Orthonormal rows spanning the orthogonal complement of an orthonormal-row basis."""
    d, n = basis.shape
    if d == 0:
        return np.eye(n, dtype=complex)
    if d == n:
        return np.zeros((0, n), dtype=complex)
    _, _, vh = np.linalg.svd(basis, full_matrices=True)
    return vh[d:].copy()


def penrose_residuals(a: np.ndarray, x: np.ndarray) -> tuple[float, float, float, float]:
    """Spectral-norm residuals of the four Penrose equations for candidate ``x``."""
    ax = a @ x
    xa = x @ a
    return (
        spectral_norm(ax @ a - a),
        spectral_norm(xa @ x - x),
        spectral_norm(ax - conj_t(ax)),
        spectral_norm(xa - conj_t(xa)),
    )
