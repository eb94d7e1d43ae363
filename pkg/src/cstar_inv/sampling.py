"""Random instances for property suites, tests and the CLI.

Every function takes an explicit :class:`numpy.random.Generator` so that a
fixed seed reproduces the same stream of instances.
"""

from __future__ import annotations

import numpy as np

from .algebra import AlgebraElement, AlgebraShape
from .module import ModuleVector
from .operators import Operator

SHAPES = (AlgebraShape((1,)), AlgebraShape((2,)), AlgebraShape((1, 2)), AlgebraShape((2, 3)))
RANKS = (1, 2, 3, 4)


def complex_gaussian(rng: np.random.Generator, *size) -> np.ndarray:
    return (rng.standard_normal(size) + 1j * rng.standard_normal(size)) / np.sqrt(2)


def random_shape_rank(rng: np.random.Generator, *, min_dim: int = 1, min_total: int = 1):
    """A ``(shape, k)`` pair from the standard grid.

    ``min_dim`` bounds the largest ``k n_i`` from below, ``min_total`` the sum
    of all ``k n_i``.
    """
    pairs = [(s, k) for s in SHAPES for k in RANKS
             if k * max(s.block_dims) >= min_dim and k * sum(s.block_dims) >= min_total]
    shape, k = pairs[rng.integers(len(pairs))]
    return shape, k


def random_element(rng, shape) -> AlgebraElement:
    shape = AlgebraShape.of(shape)
    return AlgebraElement(shape, [complex_gaussian(rng, n, n) for n in shape.block_dims])


def random_vector(rng, shape, rank: int) -> ModuleVector:
    shape = AlgebraShape.of(shape)
    return ModuleVector(shape, rank, [complex_gaussian(rng, rank * n, n) for n in shape.block_dims])


def random_operator(rng, shape, rank: int) -> Operator:
    shape = AlgebraShape.of(shape)
    return Operator(shape, rank, [complex_gaussian(rng, rank * n, rank * n) for n in shape.block_dims])


def random_rank_deficient(rng, shape, rank: int) -> Operator:
    """An operator with as many exactly zero rows as zero columns.

    The surviving square submatrix is generically invertible, so the kernel
    and cokernel are coordinate subspaces and the singular values that
    should vanish are exactly zero, not rounding noise.
    """
    shape = AlgebraShape.of(shape)
    blocks = []
    for n in shape.block_dims:
        m = rank * n
        b = complex_gaussian(rng, m, m)
        drop = int(rng.binomial(m, 0.4))
        b[rng.permutation(m)[:drop]] = 0.0
        b[:, rng.permutation(m)[:drop]] = 0.0
        blocks.append(b)
    return Operator(shape, rank, blocks)


def random_unitary_matrix(rng, m: int) -> np.ndarray:
    q, r = np.linalg.qr(complex_gaussian(rng, m, m))
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_unitary(rng, shape, rank: int) -> Operator:
    shape = AlgebraShape.of(shape)
    return Operator(shape, rank, [random_unitary_matrix(rng, rank * n) for n in shape.block_dims])


def random_projection_ranks(rng, shape, rank: int, *, proper_block: bool = False) -> list[int]:
    """Per-block ranks of a nontrivial projection (neither 0 nor I overall).

    With ``proper_block`` at least one block gets a rank strictly between 0 and
    its size, which is what a nonzero off-diagonal corner needs.
    """
    dims = [rank * n for n in AlgebraShape.of(shape).block_dims]
    if proper_block and max(dims) < 2:
        raise ValueError("no block admits a proper projection")
    if sum(dims) < 2:
        raise ValueError("A^k has no nontrivial submodule")
    while True:
        ranks = [int(rng.integers(0, d + 1)) for d in dims]
        if sum(ranks) == 0 or ranks == dims:
            continue
        if proper_block and not any(0 < r < d for r, d in zip(ranks, dims)):
            continue
        return ranks


def random_frame(rng, shape, rank: int) -> list[np.ndarray]:
    """One random unitary per block; the first ``r_i`` columns span a submodule."""
    return [random_unitary_matrix(rng, rank * n) for n in AlgebraShape.of(shape).block_dims]


def projection_from_frame(frame, ranks, shape, rank: int) -> Operator:
    return Operator(shape, rank, [q[:, :r] @ q[:, :r].conj().T for q, r in zip(frame, ranks)])


def in_frame(frame, shape, rank: int, blocks) -> Operator:
    """Conjugate per-block matrices written in the frame's basis back to coordinates."""
    return Operator(shape, rank, [q @ b @ q.conj().T for q, b in zip(frame, blocks)])


def random_nilpotent(rng, shape, rank: int) -> Operator:
    """A strictly upper triangular matrix per block, conjugated by a random unitary."""
    shape = AlgebraShape.of(shape)
    blocks = []
    for n in shape.block_dims:
        m = rank * n
        u = np.triu(complex_gaussian(rng, m, m), 1)
        q = random_unitary_matrix(rng, m)
        blocks.append(q @ u @ q.conj().T)
    return Operator(shape, rank, blocks)


def corner_operator(frame, ranks, shape, rank: int, a=None, b=None, c=None, d=None) -> Operator:
    """Operator whose matrix in the frame basis has the given corners.

    Each of ``a, b, c, d`` is a callable ``(rows, cols) -> ndarray`` or ``None``
    for a zero corner; ``a`` is the ``W -> W`` corner, ``b`` the ``W^⊥ -> W``
    one, ``c`` the ``W -> W^⊥`` one and ``d`` the ``W^⊥ -> W^⊥`` one.
    """
    blocks = []
    for q, r in zip(frame, ranks):
        m = q.shape[0]
        mat = np.zeros((m, m), dtype=complex)
        for fn, rows, cols in ((a, slice(0, r), slice(0, r)), (b, slice(0, r), slice(r, m)),
                               (c, slice(r, m), slice(0, r)), (d, slice(r, m), slice(r, m))):
            nr, nc = rows.stop - rows.start, cols.stop - cols.start
            if fn is not None and nr and nc:
                mat[rows, cols] = fn(nr, nc)
        blocks.append(q @ mat @ q.conj().T)
    return Operator(shape, rank, blocks)


def random_invariant_pair(rng, shape, rank: int, *, reducing: bool = False, proper_block: bool = False):
    """A random ``(T, W)`` with ``W`` nontrivial and ``T``-invariant (reducing if asked).

    Returns ``(T, P, frame, ranks)`` with ``P`` the projection onto ``W``.
    """
    ranks = random_projection_ranks(rng, shape, rank, proper_block=proper_block)
    frame = random_frame(rng, shape, rank)
    g = lambda r, c: complex_gaussian(rng, r, c)  # noqa: E731
    T = corner_operator(frame, ranks, shape, rank, a=g, b=None if reducing else g, d=g)
    return T, projection_from_frame(frame, ranks, shape, rank), frame, ranks
