"""Complemented submodules of ``A^k`` and their interaction with operators.

Over a finite-dimensional coefficient algebra every closed submodule is
complemented, so a submodule is represented by its orthogonal projection.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from . import _linalg
from .algebra import DEFAULT_TOL, ToleranceConfig
from .errors import CornerSupportViolation, ShapeMismatch
from .module import ModuleVector
from .operators import Operator, apply, identity_operator, zero_operator

__all__ = [
    "Submodule",
    "submodule_from_generators",
    "complement",
    "is_invariant",
    "is_reducing",
    "invariance_residual",
    "reducing_residual",
    "block_decompose",
    "assemble_from_blocks",
]


class Submodule:
    """A complemented submodule ``W = Ran(P)``.

    ``generators`` is optional metadata; the projection is authoritative.
    Construction validates ``P = P^* = P^2`` and ``P g = g`` for generators.
    """

    __slots__ = ("projection", "generators")

    def __init__(self, projection: Operator, generators: Sequence[ModuleVector] | None = None,
                 tol: ToleranceConfig = DEFAULT_TOL):
        P = projection
        if (P @ P - P).norm() > tol.threshold(1.0):
            raise ValueError(f"projection is not idempotent (residual {(P @ P - P).norm():.3e})")
        if (P.H - P).norm() > tol.threshold(1.0):
            raise ValueError(f"projection is not self-adjoint (residual {(P.H - P).norm():.3e})")
        gens = None
        if generators is not None:
            gens = tuple(generators)
            for j, g in enumerate(gens):
                if g.shape != P.shape or g.rank != P.rank:
                    raise ShapeMismatch(f"generator {j} does not live in the ambient module")
                if (apply(P, g) - g).norm() > tol.threshold(g.norm()):
                    raise ValueError(f"generator {j} is not fixed by the projection")
        object.__setattr__(self, "projection", P)
        object.__setattr__(self, "generators", gens)

    def __setattr__(self, name, value):
        raise AttributeError("Submodule is immutable")

    @property
    def shape(self):
        return self.projection.shape

    @property
    def rank(self) -> int:
        return self.projection.rank

    @classmethod
    def zero(cls, shape, rank: int) -> "Submodule":
        return cls(zero_operator(shape, rank))

    @classmethod
    def full(cls, shape, rank: int) -> "Submodule":
        return cls(identity_operator(shape, rank))

    def block_ranks(self) -> list[int]:
        """Complex dimension of ``W`` inside each ``C^{k n_i}`` column space."""
        return [int(round(np.trace(b).real)) for b in self.projection.blocks]

    def is_zero(self, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
        return self.projection.norm() <= tol.threshold(1.0)

    def is_full(self, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
        return (self.projection.identity() - self.projection).norm() <= tol.threshold(1.0)

    def nontrivial(self, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
        return not self.is_zero(tol) and not self.is_full(tol)

    def contains(self, x: ModuleVector, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
        return (apply(self.projection, x) - x).norm() <= tol.threshold(x.norm())

    def __repr__(self):
        return f"Submodule(shape={self.shape}, rank={self.rank}, block_ranks={self.block_ranks()})"


def submodule_from_generators(gens: Sequence[ModuleVector]) -> Submodule:
    """The closed A-span of ``gens`` as ``G G^+``, ``G`` the generator matrix."""
    gens = list(gens)
    if not gens:
        raise ValueError("at least one generator is required")
    shape, rank = gens[0].shape, gens[0].rank
    for g in gens:
        if g.shape != shape or g.rank != rank:
            raise ShapeMismatch("generators live in different modules")
    mats = [np.hstack([g.blocks[i] for g in gens]) for i in range(shape.num_blocks)]
    scale = max(float(np.linalg.norm(m, 2)) for m in mats)
    blocks = [_linalg.range_projector(m, scale=scale) for m in mats]
    return Submodule(Operator(shape, rank, blocks), gens)


def complement(W: Submodule) -> Submodule:
    P = W.projection
    return Submodule(P.identity() - P)


def _check_pair(T: Operator, W: Submodule):
    if T.shape != W.shape or T.rank != W.rank:
        raise ShapeMismatch(f"{T!r} and {W!r} live on different modules")


def invariance_residual(T: Operator, W: Submodule) -> float:
    """``||P T P - T P||``, which vanishes exactly when ``T(W) ⊆ W``."""
    _check_pair(T, W)
    P = W.projection
    TP = T @ P
    return (P @ TP - TP).norm()


def reducing_residual(T: Operator, W: Submodule) -> float:
    """``||T P - P T||``."""
    _check_pair(T, W)
    P = W.projection
    return (T @ P - P @ T).norm()


def is_invariant(T: Operator, W: Submodule, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    return invariance_residual(T, W) <= tol.threshold(T.norm())


def is_reducing(T: Operator, W: Submodule, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    return reducing_residual(T, W) <= tol.threshold(T.norm())


def block_decompose(T: Operator, W: Submodule):
    """Corners of ``T`` with respect to ``E = W ⊕ W^⊥``.

    Returns ``(A, B, C, D) = (PTP, PT(I-P), (I-P)TP, (I-P)T(I-P))`` as
    operators on the whole module, so that ``T = A + B + C + D``. ``C``
    vanishes iff ``W`` is invariant, ``B`` and ``C`` together iff it reduces ``T``.
    """
    _check_pair(T, W)
    P = W.projection
    Q = P.identity() - P
    return P @ T @ P, P @ T @ Q, Q @ T @ P, Q @ T @ Q


def assemble_from_blocks(A: Operator, B: Operator, C: Operator, D: Operator, W: Submodule,
                         tol: ToleranceConfig = DEFAULT_TOL) -> Operator:
    """Inverse of :func:`block_decompose`; each block must sit in its corner."""
    P = W.projection
    Q = P.identity() - P
    for name, X, left, right in (("A", A, P, P), ("B", B, P, Q), ("C", C, Q, P), ("D", D, Q, Q)):
        _check_pair(X, W)
        leak = (left @ X @ right - X).norm()
        if leak > tol.threshold(X.norm()):
            raise CornerSupportViolation(f"block {name} leaks out of its corner by {leak:.3e}")
    return A + B + C + D
