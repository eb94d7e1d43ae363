"""The standard Hilbert module ``E = A^k``.

A vector ``x = (x_1, ..., x_k)`` is stored per algebra block ``i`` as the
``(k*n_i) x n_i`` matrix obtained by stacking the ``i``-th blocks of its
entries. Then ``<x, y> = sum_j x_j^* y_j`` is ``x_i^H y_i`` blockwise, right
multiplication by ``a`` is ``x_i a_i``, and operators act by plain matrix
products.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .algebra import DEFAULT_TOL, AlgebraElement, AlgebraShape, ToleranceConfig, _frozen
from .errors import ShapeMismatch

__all__ = [
    "ModuleVector",
    "inner_product",
    "vector_norm",
    "right_action",
    "rank_one",
]


class ModuleVector:
    """An element of ``A^k``."""

    __slots__ = ("shape", "rank", "blocks")

    def __init__(self, shape, rank: int, blocks: Sequence):
        shape = AlgebraShape.of(shape)
        rank = int(rank)
        if rank < 1:
            raise ValueError("module rank must be positive")
        blocks = tuple(_frozen(b) for b in blocks)
        if len(blocks) != shape.num_blocks:
            raise ShapeMismatch(f"expected {shape.num_blocks} blocks, got {len(blocks)}")
        for i, (n, b) in enumerate(zip(shape.block_dims, blocks)):
            if b.shape != (rank * n, n):
                raise ShapeMismatch(f"block {i} must be {rank * n}x{n}, got {b.shape}")
        object.__setattr__(self, "shape", shape)
        object.__setattr__(self, "rank", rank)
        object.__setattr__(self, "blocks", blocks)

    def __setattr__(self, name, value):
        raise AttributeError("ModuleVector is immutable")

    @classmethod
    def from_entries(cls, entries: Sequence[AlgebraElement]) -> "ModuleVector":
        entries = list(entries)
        if not entries:
            raise ValueError("a module vector needs at least one entry")
        shape = entries[0].shape
        for e in entries:
            if e.shape != shape:
                raise ShapeMismatch(f"entries have shapes {shape} and {e.shape}")
        blocks = [np.vstack([e.blocks[i] for e in entries]) for i in range(shape.num_blocks)]
        return cls(shape, len(entries), blocks)

    @classmethod
    def zeros(cls, shape, rank: int) -> "ModuleVector":
        shape = AlgebraShape.of(shape)
        return cls(shape, rank, [np.zeros((rank * n, n)) for n in shape.block_dims])

    @classmethod
    def basis(cls, shape, rank: int, j: int) -> "ModuleVector":
        """Coordinate vector with the unit in slot ``j`` and zeros elsewhere."""
        shape = AlgebraShape.of(shape)
        blocks = []
        for n in shape.block_dims:
            b = np.zeros((rank * n, n), dtype=complex)
            b[j * n:(j + 1) * n] = np.eye(n)
            blocks.append(b)
        return cls(shape, rank, blocks)

    @property
    def entries(self) -> tuple[AlgebraElement, ...]:
        dims = self.shape.block_dims
        return tuple(
            AlgebraElement(self.shape, [b[j * n:(j + 1) * n] for n, b in zip(dims, self.blocks)])
            for j in range(self.rank)
        )

    def _check(self, other):
        if not isinstance(other, ModuleVector):
            raise TypeError(f"expected ModuleVector, got {type(other).__name__}")
        if other.shape != self.shape or other.rank != self.rank:
            raise ShapeMismatch(
                f"vectors in A^{self.rank} over {self.shape} and A^{other.rank} over {other.shape}")

    def __add__(self, other: "ModuleVector") -> "ModuleVector":
        self._check(other)
        return ModuleVector(self.shape, self.rank, [a + b for a, b in zip(self.blocks, other.blocks)])

    def __sub__(self, other: "ModuleVector") -> "ModuleVector":
        self._check(other)
        return ModuleVector(self.shape, self.rank, [a - b for a, b in zip(self.blocks, other.blocks)])

    def __neg__(self) -> "ModuleVector":
        return ModuleVector(self.shape, self.rank, [-b for b in self.blocks])

    def __mul__(self, c: complex) -> "ModuleVector":
        if isinstance(c, (AlgebraElement, ModuleVector)):
            return NotImplemented
        return ModuleVector(self.shape, self.rank, [c * b for b in self.blocks])

    __rmul__ = __mul__

    def norm(self) -> float:
        return vector_norm(self)

    def allclose(self, other: "ModuleVector", tol: ToleranceConfig = DEFAULT_TOL) -> bool:
        self._check(other)
        return tol.close(self, other)

    def __repr__(self):
        return f"ModuleVector(shape={self.shape}, rank={self.rank})"


def inner_product(x: ModuleVector, y: ModuleVector) -> AlgebraElement:
    """``<x, y> = sum_j x_j^* y_j``; conjugate-linear in ``x``, A-linear in ``y``."""
    x._check(y)
    return AlgebraElement(x.shape, [a.conj().T @ b for a, b in zip(x.blocks, y.blocks)])


def vector_norm(x: ModuleVector) -> float:
    """``||<x, x>||^(1/2)``, which equals the largest singular value over blocks."""
    return max(float(np.linalg.norm(b, 2)) for b in x.blocks)


def right_action(x: ModuleVector, a: AlgebraElement) -> ModuleVector:
    """Right multiplication ``x a = (x_1 a, ..., x_k a)``."""
    if a.shape != x.shape:
        raise ShapeMismatch(f"vector over {x.shape} cannot be multiplied by element of {a.shape}")
    return ModuleVector(x.shape, x.rank, [b @ c for b, c in zip(x.blocks, a.blocks)])


def rank_one(x: ModuleVector, y: ModuleVector):
    """The operator ``theta_{x,y}: z -> x <y, z>``."""
    from .operators import Operator

    x._check(y)
    return Operator(x.shape, x.rank, [a @ b.conj().T for a, b in zip(x.blocks, y.blocks)])
