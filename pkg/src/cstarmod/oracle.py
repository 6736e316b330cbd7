"""Row-reduction subspace oracle.

Gaussian elimination with partial pivoting, independent of the SVD-based
machinery in ``matkit``/``hmod``. Used to cross-check kernels, ranges, sums
and intersections on small instances. Vectors are rows throughout.
"""

from __future__ import annotations

import numpy as np

from .matkit import RANK_TOL_FACTOR


def _threshold(a: np.ndarray, tol: float | None) -> float:
    if tol is None:
        tol = RANK_TOL_FACTOR * max(a.shape + (1,))
    scale = float(np.max(np.abs(a))) if a.size else 0.0
    return tol * scale


def rref(a, tol: float | None = None, ncols: int | None = None, atol: float | None = None):
    """Reduced row echelon form; returns ``(R, pivot_columns)``.

    Only the first ``ncols`` columns are eligible as pivots (all by default).
    Entries whose magnitude is at most ``tol * max|a|`` (or ``atol`` when
    given) count as zero.
    """
    r = np.array(a, dtype=complex)
    thr = _threshold(r, tol) if atol is None else atol
    rows, cols = r.shape
    ncols = cols if ncols is None else ncols
    pivots = []
    lead = 0
    for c in range(ncols):
        if lead >= rows:
            break
        k = lead + int(np.argmax(np.abs(r[lead:, c])))
        if abs(r[k, c]) <= thr:
            r[lead:, c] = 0.0
            continue
        if k != lead:
            r[[lead, k]] = r[[k, lead]]
        r[lead] = r[lead] / r[lead, c]
        for j in range(rows):
            if j != lead and r[j, c] != 0.0:
                r[j] = r[j] - r[j, c] * r[lead]
        r[lead, c] = 1.0
        pivots.append(c)
        lead += 1
    return r, pivots


def row_space_basis(a, tol: float | None = None, atol: float | None = None) -> np.ndarray:
    a = np.atleast_2d(np.asarray(a, dtype=complex))
    if a.shape[0] == 0:
        return np.zeros((0, a.shape[1]), dtype=complex)
    r, piv = rref(a, tol, atol=atol)
    return r[: len(piv)].copy()


def right_null_space(a, tol: float | None = None) -> np.ndarray:
    """Rows ``z`` with ``a @ z = 0`` (as a column), one per free variable."""
    a = np.atleast_2d(np.asarray(a, dtype=complex))
    n = a.shape[1]
    r, piv = rref(a, tol)
    free = [c for c in range(n) if c not in piv]
    out = np.zeros((len(free), n), dtype=complex)
    for j, f in enumerate(free):
        out[j, f] = 1.0
        for i, pc in enumerate(piv):
            out[j, pc] = -r[i, f]
    return out


def kernel_basis(b, tol: float | None = None) -> np.ndarray:
    """Rows ``x`` with ``x @ b = 0``."""
    return right_null_space(np.asarray(b).T, tol)


def range_basis(b, tol: float | None = None) -> np.ndarray:
    return row_space_basis(b, tol)


def sum_basis(u, w, tol: float | None = None) -> np.ndarray:
    return row_space_basis(np.vstack([u, w]), tol)


def intersection_basis(u, w, tol: float | None = None) -> np.ndarray:
    """Zassenhaus: reduce ``[[U, U], [W, 0]]``; rows with vanishing left half span the intersection."""
    u = np.atleast_2d(np.asarray(u, dtype=complex))
    w = np.atleast_2d(np.asarray(w, dtype=complex))
    n = max(u.shape[1], w.shape[1])
    u = u.reshape(-1, n)
    w = w.reshape(-1, n)
    if u.shape[0] == 0 or w.shape[0] == 0:
        return np.zeros((0, n), dtype=complex)
    z = np.block([[u, u], [w, np.zeros_like(w)]])
    thr = _threshold(z, tol)
    r, piv = rref(z, ncols=n, atol=thr)
    rest = r[len(piv):, n:]
    return row_space_basis(rest, atol=thr) if rest.shape[0] else np.zeros((0, n), dtype=complex)


def same_subspace(oracle_rows: np.ndarray, basis: np.ndarray, tol: float = 1e-8) -> bool:
    """Equal dimension and every oracle row lies in the span of the orthonormal ``basis``."""
    if oracle_rows.shape[0] != basis.shape[0]:
        return False
    if oracle_rows.shape[0] == 0:
        return True
    p = basis.conj().T @ basis
    for row in oracle_rows:
        v = row / np.linalg.norm(row)
        if np.linalg.norm(v - v @ p) > tol:
            return False
    return True
