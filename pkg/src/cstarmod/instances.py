"""Seeded random instances: operators, projections and projection pairs.

All randomness flows through ``numpy.random.Generator`` objects built on
PCG64; :func:`trial_rng` derives a per-trial stream from the master seed and
the trial index so that results do not depend on execution order.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .cstar import BlockAlgebra
from .errors import InvalidRank
from .hmod import ModuleSpace
from .modop import ModuleOperator

RNG_ALGORITHM = "numpy.random.PCG64 seeded by SeedSequence(entropy=master_seed, spawn_key=(trial,))"


def trial_rng(master_seed: int, trial: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy=master_seed, spawn_key=(trial,))))


def _as_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.PCG64(seed))


def haar_unitary_columns(n: int, r: int, rng: np.random.Generator) -> np.ndarray:
    """``n x r`` matrix with orthonormal columns, Haar distributed."""
    g = rng.standard_normal((n, r)) + 1j * rng.standard_normal((n, r))
    q, rr = np.linalg.qr(g)
    d = np.diag(rr)
    return q * (d / np.where(np.abs(d) == 0, 1.0, np.abs(d)))


def generate_random_projection(space: ModuleSpace, rank_profile: Sequence[int], seed) -> ModuleOperator:
    """Orthogonal projection onto a Haar-random subspace of dimension ``rank_profile[i]`` per block."""
    rng = _as_rng(seed)
    if len(rank_profile) != space.algebra.num_blocks:
        raise InvalidRank("one rank per block is required")
    blocks = []
    for w, r in zip(space.widths, rank_profile):
        if not 0 <= r <= w:
            raise InvalidRank(f"rank {r} outside [0, {w}]")
        u = haar_unitary_columns(w, r, rng) if r else np.zeros((w, 0), dtype=complex)
        # rows of u^T span the subspace; projector on row vectors is conj(u) u^T
        p = u.conj() @ u.T
        blocks.append(0.5 * (p + p.conj().T))
    return ModuleOperator(space, space, tuple(blocks))


def random_rank_profile(space: ModuleSpace, rng: np.random.Generator) -> list[int]:
    return [int(rng.integers(0, w + 1)) for w in space.widths]


def random_projection(space: ModuleSpace, rng: np.random.Generator) -> ModuleOperator:
    return generate_random_projection(space, random_rank_profile(space, rng), rng)


def commuting_projection_pair(space: ModuleSpace, rng: np.random.Generator):
    """Two projections diagonal in one shared random orthonormal basis."""
    pb, qb = [], []
    for w in space.widths:
        u = haar_unitary_columns(w, w, rng)
        for out in (pb, qb):
            mask = rng.integers(0, 2, size=w).astype(float)
            p = (u.conj() * mask) @ u.T
            out.append(0.5 * (p + p.conj().T))
    return ModuleOperator(space, space, tuple(pb)), ModuleOperator(space, space, tuple(qb))


def nested_projection_pair(space: ModuleSpace, rng: np.random.Generator):
    """``P <= Q``: the range of the first is contained in the range of the second."""
    pb, qb = [], []
    for w in space.widths:
        u = haar_unitary_columns(w, w, rng)
        rq = int(rng.integers(0, w + 1))
        rp = int(rng.integers(0, rq + 1))
        for r, out in ((rp, pb), (rq, qb)):
            p = u[:, :r].conj() @ u[:, :r].T
            out.append(0.5 * (p + p.conj().T))
    return ModuleOperator(space, space, tuple(pb)), ModuleOperator(space, space, tuple(qb))


def random_operator(
    domain: ModuleSpace,
    codomain: ModuleSpace,
    rng: np.random.Generator,
    rank_profile: Sequence[int] | None = None,
    sv_range: tuple[float, float] = (1e-2, 1e1),
) -> ModuleOperator:
    """Operator with Haar singular vectors and log-uniform nonzero singular values.

    Without ``rank_profile`` each block gets a uniform rank in ``[0, min(k n_i, m n_i)]``,
    so rank-deficient and zero blocks occur regularly.
    """
    blocks = []
    lo, hi = np.log(sv_range[0]), np.log(sv_range[1])
    for i, (a, b) in enumerate(zip(domain.widths, codomain.widths)):
        r = int(rng.integers(0, min(a, b) + 1)) if rank_profile is None else int(rank_profile[i])
        if not 0 <= r <= min(a, b):
            raise InvalidRank(f"rank {r} outside [0, {min(a, b)}]")
        if r == 0:
            blocks.append(np.zeros((a, b), dtype=complex))
            continue
        u = haar_unitary_columns(a, r, rng)
        v = haar_unitary_columns(b, r, rng)
        s = np.exp(rng.uniform(lo, hi, size=r))
        blocks.append((u * s) @ v.conj().T)
    return ModuleOperator(domain, codomain, tuple(blocks))


def random_nonzero_operator(domain: ModuleSpace, codomain: ModuleSpace, rng: np.random.Generator) -> ModuleOperator:
    for _ in range(100):
        t = random_operator(domain, codomain, rng)
        if any(np.any(b) for b in t.blocks):
            return t
    # every block drew rank 0 a hundred times; force full rank
    return random_operator(domain, codomain, rng, [min(a, b) for a, b in zip(domain.widths, codomain.widths)])


def random_lambdas(rng: np.random.Generator, count: int = 10, radius: float = 2.0) -> list[complex]:
    """Uniform points in the closed disk ``|lambda| <= radius``."""
    r = radius * np.sqrt(rng.uniform(0.0, 1.0, size=count))
    th = rng.uniform(0.0, 2 * np.pi, size=count)
    return [complex(z) for z in r * np.exp(1j * th)]


def line_projection(space: ModuleSpace, angles: Sequence[float]) -> ModuleOperator:
    """Over commutative algebras with ``k = 2``: per block the projection onto the real line at ``angles[i]``."""
    blocks = []
    for w, th in zip(space.widths, angles):
        if w != 2:
            raise InvalidRank("line projections need block width 2 (A = C + ... + C, k = 2)")
        v = np.array([np.cos(th), np.sin(th)])
        blocks.append(np.outer(v, v).astype(complex))
    return ModuleOperator(space, space, tuple(blocks))


def witness_pair():
    """The hand-built pair over ``C + C`` on ``A^2``.

    Block 1: ``Ran(Q)`` and ``Ran(P)`` at angle pi/2 (``PQ = 0`` there);
    block 2: at angle pi/4.
    """
    space = ModuleSpace(BlockAlgebra((1, 1)), 2)
    q = line_projection(space, [0.0, 0.0])
    p = line_projection(space, [np.pi / 2, np.pi / 4])
    return p, q
