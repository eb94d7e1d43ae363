"""Finite-dimensional C*-algebras ``A = M_{n_1}(C) ⊕ ... ⊕ M_{n_m}(C)``.

Elements are stored as one dense complex matrix per direct summand. Every
operation is blockwise, and every value is immutable once built.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import ShapeMismatch

__all__ = [
    "AlgebraShape",
    "AlgebraElement",
    "ToleranceConfig",
    "star",
    "mul",
    "norm",
    "is_positive",
    "identity",
    "zero",
]


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=complex)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class AlgebraShape:
    """Ordered list of block sizes ``(n_1, ..., n_m)``."""

    block_dims: tuple[int, ...]

    def __post_init__(self):
        dims = tuple(int(n) for n in self.block_dims)
        if not dims:
            raise ValueError("an algebra needs at least one block")
        if any(n < 1 for n in dims):
            raise ValueError(f"block sizes must be positive, got {dims}")
        object.__setattr__(self, "block_dims", dims)

    @classmethod
    def of(cls, dims: "AlgebraShape | Iterable[int] | int") -> "AlgebraShape":
        if isinstance(dims, AlgebraShape):
            return dims
        if isinstance(dims, (int, np.integer)):
            return cls((int(dims),))
        return cls(tuple(dims))

    @property
    def num_blocks(self) -> int:
        return len(self.block_dims)

    @property
    def dimension(self) -> int:
        """Complex dimension of the algebra, ``sum n_i**2``."""
        return sum(n * n for n in self.block_dims)

    def __iter__(self):
        return iter(self.block_dims)

    def __str__(self):
        return "(" + ",".join(str(n) for n in self.block_dims) + ")"


@dataclass(frozen=True)
class ToleranceConfig:
    """Tolerances and seed used for every approximate decision.

    Two quantities ``x`` and ``y`` are considered equal when
    ``||x - y|| <= atol + rtol * max(||x||, ||y||)``.
    """

    atol: float = 1e-9
    rtol: float = 1e-7
    seed: int = 0
    search_budget: int = 2000

    def __post_init__(self):
        if self.atol < 0 or self.rtol < 0:
            raise ValueError("tolerances must be non-negative")
        if self.seed < 0:
            raise ValueError("seed must be an unsigned integer")
        if self.search_budget < 1:
            raise ValueError("search_budget must be positive")

    def threshold(self, *scales: float) -> float:
        """``atol + rtol * max(scales)``; the scale is 0 when none is given."""
        scale = max((float(s) for s in scales), default=0.0)
        return self.atol + self.rtol * scale

    def close(self, x, y) -> bool:
        """Approximate equality of two algebra elements, vectors or operators."""
        return float((x - y).norm()) <= self.threshold(x.norm(), y.norm())

    def replace(self, **changes) -> "ToleranceConfig":
        fields = dict(atol=self.atol, rtol=self.rtol, seed=self.seed,
                      search_budget=self.search_budget)
        fields.update({k: v for k, v in changes.items() if v is not None})
        return ToleranceConfig(**fields)


DEFAULT_TOL = ToleranceConfig()


class AlgebraElement:
    """An element of ``A``, one square complex matrix per block."""

    __slots__ = ("shape", "blocks")

    def __init__(self, shape, blocks: Sequence):
        shape = AlgebraShape.of(shape)
        blocks = tuple(_frozen(b) for b in blocks)
        if len(blocks) != shape.num_blocks:
            raise ShapeMismatch(
                f"expected {shape.num_blocks} blocks for shape {shape}, got {len(blocks)}")
        for i, (n, b) in enumerate(zip(shape.block_dims, blocks)):
            if b.shape != (n, n):
                raise ShapeMismatch(f"block {i} must be {n}x{n}, got {b.shape}")
        object.__setattr__(self, "shape", shape)
        object.__setattr__(self, "blocks", blocks)

    def __setattr__(self, name, value):
        raise AttributeError("AlgebraElement is immutable")

    @classmethod
    def scalar(cls, shape, value: complex) -> "AlgebraElement":
        shape = AlgebraShape.of(shape)
        return cls(shape, [value * np.eye(n) for n in shape.block_dims])

    def _check(self, other: "AlgebraElement"):
        if not isinstance(other, AlgebraElement):
            raise TypeError(f"expected AlgebraElement, got {type(other).__name__}")
        if other.shape != self.shape:
            raise ShapeMismatch(f"shapes differ: {self.shape} vs {other.shape}")

    def star(self) -> "AlgebraElement":
        return AlgebraElement(self.shape, [b.conj().T for b in self.blocks])

    def norm(self) -> float:
        return max(float(np.linalg.norm(b, 2)) for b in self.blocks)

    def __matmul__(self, other: "AlgebraElement") -> "AlgebraElement":
        self._check(other)
        return AlgebraElement(self.shape, [a @ b for a, b in zip(self.blocks, other.blocks)])

    def __add__(self, other: "AlgebraElement") -> "AlgebraElement":
        self._check(other)
        return AlgebraElement(self.shape, [a + b for a, b in zip(self.blocks, other.blocks)])

    def __sub__(self, other: "AlgebraElement") -> "AlgebraElement":
        self._check(other)
        return AlgebraElement(self.shape, [a - b for a, b in zip(self.blocks, other.blocks)])

    def __neg__(self) -> "AlgebraElement":
        return AlgebraElement(self.shape, [-b for b in self.blocks])

    def __mul__(self, c: complex) -> "AlgebraElement":
        if isinstance(c, AlgebraElement):
            return NotImplemented
        return AlgebraElement(self.shape, [c * b for b in self.blocks])

    __rmul__ = __mul__

    def allclose(self, other: "AlgebraElement", tol: ToleranceConfig = DEFAULT_TOL) -> bool:
        self._check(other)
        return tol.close(self, other)

    def __repr__(self):
        return f"AlgebraElement(shape={self.shape}, blocks={[b.tolist() for b in self.blocks]})"


def star(a: AlgebraElement) -> AlgebraElement:
    """Blockwise conjugate transpose."""
    return a.star()


def mul(a: AlgebraElement, b: AlgebraElement) -> AlgebraElement:
    """Blockwise product; raises :class:`ShapeMismatch` for different shapes."""
    return a @ b


def norm(a: AlgebraElement) -> float:
    """C*-norm: the largest singular value over all blocks."""
    return a.norm()


def is_positive(a: AlgebraElement, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    """Self-adjoint within tolerance and no eigenvalue below ``-atol``."""
    if (a - a.star()).norm() > tol.threshold(a.norm()):
        return False
    for b in a.blocks:
        herm = (b + b.conj().T) / 2
        if np.linalg.eigvalsh(herm).min() < -tol.atol:
            return False
    return True


def identity(shape) -> AlgebraElement:
    """The unit of ``A``."""
    return AlgebraElement.scalar(shape, 1.0)


def zero(shape) -> AlgebraElement:
    return AlgebraElement.scalar(shape, 0.0)
