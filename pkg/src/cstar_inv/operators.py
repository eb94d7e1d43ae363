"""Adjointable operators on ``A^k``.

``L(A^k) = M_k(A)`` and, since ``A = ⊕ M_{n_i}``, ``M_k(A) ≅ ⊕ M_{k n_i}(C)``.
An :class:`Operator` keeps one ``(k n_i) x (k n_i)`` complex matrix per
algebra block; the ``k x k`` grid of algebra elements is a view of the same
data. Any square matrix of that size is a grid, so every blockwise construction
(SVD included) stays inside ``M_k(A)``.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from . import _linalg
from .algebra import DEFAULT_TOL, AlgebraElement, AlgebraShape, ToleranceConfig, _frozen
from .errors import ShapeMismatch
from .module import ModuleVector, inner_product

__all__ = [
    "Operator",
    "identity_operator",
    "zero_operator",
    "apply",
    "compose",
    "adjoint",
    "operator_norm",
    "moore_penrose",
    "tikhonov_inverse",
    "penrose_residuals",
    "canonical_projections",
    "kernel_projection",
    "is_partial_isometry",
    "is_orthogonal_projection",
    "is_unitary",
    "verify_adjoint_contract",
]


class Operator:
    """An element of ``M_k(A)`` acting on ``A^k`` from the left."""

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
            if b.shape != (rank * n, rank * n):
                raise ShapeMismatch(f"block {i} must be {rank * n}x{rank * n}, got {b.shape}")
        object.__setattr__(self, "shape", shape)
        object.__setattr__(self, "rank", rank)
        object.__setattr__(self, "blocks", blocks)

    def __setattr__(self, name, value):
        raise AttributeError("Operator is immutable")

    @classmethod
    def from_grid(cls, grid: Sequence[Sequence[AlgebraElement]]) -> "Operator":
        """Build from a ``k x k`` grid of algebra elements (``grid[r][c]``)."""
        rows = [list(r) for r in grid]
        k = len(rows)
        if k == 0 or any(len(r) != k for r in rows):
            raise ShapeMismatch("operator grid must be square and nonempty")
        shape = rows[0][0].shape
        for r in rows:
            for a in r:
                if a.shape != shape:
                    raise ShapeMismatch(f"grid mixes shapes {shape} and {a.shape}")
        blocks = [np.block([[a.blocks[i] for a in r] for r in rows])
                  for i in range(shape.num_blocks)]
        return cls(shape, k, blocks)

    @classmethod
    def scalar(cls, shape, rank: int, value: complex) -> "Operator":
        shape = AlgebraShape.of(shape)
        return cls(shape, rank, [value * np.eye(rank * n) for n in shape.block_dims])

    def to_grid(self) -> list[list[AlgebraElement]]:
        k, dims = self.rank, self.shape.block_dims
        return [[AlgebraElement(self.shape,
                                [b[r * n:(r + 1) * n, c * n:(c + 1) * n]
                                 for n, b in zip(dims, self.blocks)])
                 for c in range(k)] for r in range(k)]

    def _check(self, other):
        if not isinstance(other, Operator):
            raise TypeError(f"expected Operator, got {type(other).__name__}")
        if other.shape != self.shape or other.rank != self.rank:
            raise ShapeMismatch(
                f"operators on A^{self.rank} over {self.shape} and A^{other.rank} over {other.shape}")

    def _map(self, fn, *others) -> "Operator":
        for o in others:
            self._check(o)
        return Operator(self.shape, self.rank,
                        [fn(*bs) for bs in zip(self.blocks, *(o.blocks for o in others))])

    def __add__(self, other: "Operator") -> "Operator":
        return self._map(np.add, other)

    def __sub__(self, other: "Operator") -> "Operator":
        return self._map(np.subtract, other)

    def __neg__(self) -> "Operator":
        return self._map(np.negative)

    def __mul__(self, c: complex) -> "Operator":
        if isinstance(c, (Operator, ModuleVector, AlgebraElement)):
            return NotImplemented
        return self._map(lambda b: c * b)

    __rmul__ = __mul__

    def __matmul__(self, other):
        if isinstance(other, ModuleVector):
            return apply(self, other)
        return self._map(np.matmul, other)

    @property
    def H(self) -> "Operator":
        return self._map(lambda b: b.conj().T)

    def norm(self) -> float:
        return operator_norm(self)

    def identity(self) -> "Operator":
        return identity_operator(self.shape, self.rank)

    def allclose(self, other: "Operator", tol: ToleranceConfig = DEFAULT_TOL) -> bool:
        self._check(other)
        return tol.close(self, other)

    def __repr__(self):
        return f"Operator(shape={self.shape}, rank={self.rank})"


def identity_operator(shape, rank: int) -> Operator:
    return Operator.scalar(shape, rank, 1.0)


def zero_operator(shape, rank: int) -> Operator:
    return Operator.scalar(shape, rank, 0.0)


def apply(T: Operator, x: ModuleVector) -> ModuleVector:
    if x.shape != T.shape or x.rank != T.rank:
        raise ShapeMismatch(f"{T!r} cannot act on {x!r}")
    return ModuleVector(x.shape, x.rank, [t @ b for t, b in zip(T.blocks, x.blocks)])


def compose(T: Operator, S: Operator) -> Operator:
    """``T S``: first ``S``, then ``T``."""
    return T @ S


def adjoint(T: Operator) -> Operator:
    return T.H


def operator_norm(T: Operator) -> float:
    return max(float(np.linalg.norm(b, 2)) for b in T.blocks)


def moore_penrose(T: Operator) -> Operator:
    """The Moore-Penrose inverse, blockwise through the SVD.

    Singular values at most ``||T|| * k * n_i * 1e-12`` are treated as zero.
    """
    scale = T.norm()
    return T._map(lambda b: _linalg.pinv(b, scale=scale))


def tikhonov_inverse(T: Operator, eps: float = 1e-12) -> Operator:
    """``(T^*T + eps I)^{-1} T^*``, the regularised route to ``T^+``.

    Independent of the SVD; used to cross-check :func:`moore_penrose`. A
    singular value that should vanish but carries rounding noise ``d`` adds
    an error of about ``d / eps``, so agreement with the SVD route is only
    expected when the rank deficiency is exact.
    """

    def solve(b):
        bh = b.conj().T
        return np.linalg.solve(bh @ b + eps * np.eye(b.shape[0]), bh)

    return T._map(solve)


def penrose_residuals(T: Operator, X: Operator) -> dict[str, float]:
    """Norms of the four Penrose identities for a candidate inverse ``X``."""
    TX, XT = T @ X, X @ T
    return {
        "TXT=T": (TX @ T - T).norm(),
        "XTX=X": (XT @ X - X).norm(),
        "(TX)*=TX": (TX.H - TX).norm(),
        "(XT)*=XT": (XT.H - XT).norm(),
    }


def canonical_projections(T: Operator) -> tuple[Operator, Operator]:
    """``(T T^+, T^+ T)``: projections onto ``Ran(T)`` and ``Ran(T^*)``."""
    scale = T.norm()
    ran = T._map(lambda b: _linalg.range_projector(b, scale=scale))
    coran = T.H._map(lambda b: _linalg.range_projector(b, scale=scale))
    return ran, coran


def kernel_projection(T: Operator) -> Operator:
    """``I - T^+ T``, the projection onto ``Ker(T)``."""
    scale = T.norm()
    return T._map(lambda b: _linalg.kernel_projector(b, scale=scale))


def is_partial_isometry(V: Operator, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    """``V V^* V = V`` within tolerance."""
    return (V @ V.H @ V - V).norm() <= tol.threshold(V.norm())


def is_orthogonal_projection(P: Operator, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    scale = max(P.norm(), 1.0)
    return ((P @ P - P).norm() <= tol.threshold(scale)
            and (P.H - P).norm() <= tol.threshold(scale))


def is_unitary(U: Operator, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    one = U.identity()
    return ((U.H @ U - one).norm() <= tol.threshold(1.0)
            and (U @ U.H - one).norm() <= tol.threshold(1.0))


def verify_adjoint_contract(T: Operator, samples: int = 8, tol: ToleranceConfig = DEFAULT_TOL,
                            rng: np.random.Generator | None = None) -> float:
    """Largest ``||<Tx, y> - <x, T^*y>||`` relative to ``||T|| ||x|| ||y||``.

    Returns the worst relative residual over ``samples`` random pairs; the
    contract holds when it is at most ``tol.rtol``.
    """
    from .sampling import random_vector

    rng = np.random.default_rng(tol.seed) if rng is None else rng
    Th = T.H
    worst = 0.0
    for _ in range(samples):
        x = random_vector(rng, T.shape, T.rank)
        y = random_vector(rng, T.shape, T.rank)
        lhs = inner_product(apply(T, x), y)
        rhs = inner_product(x, apply(Th, y))
        scale = max(T.norm() * x.norm() * y.norm(), np.finfo(float).tiny)
        worst = max(worst, (lhs - rhs).norm() / scale)
    return worst
