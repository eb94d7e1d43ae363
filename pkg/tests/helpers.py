"""Small constructors shared by the unit tests."""

import numpy as np

from cstar_inv.algebra import AlgebraElement, AlgebraShape
from cstar_inv.module import ModuleVector
from cstar_inv.operators import Operator

SCALAR = AlgebraShape((1,))


def scalar_op(matrix) -> Operator:
    """An operator on C^k, i.e. shape (1) with k = matrix size."""
    m = np.asarray(matrix, dtype=complex)
    return Operator(SCALAR, m.shape[0], [m])


def scalar_vec(*entries) -> ModuleVector:
    v = np.asarray(entries, dtype=complex).reshape(-1, 1)
    return ModuleVector(SCALAR, v.shape[0], [v])


def element(*blocks) -> AlgebraElement:
    blocks = [np.atleast_2d(np.asarray(b, dtype=complex)) for b in blocks]
    return AlgebraElement(AlgebraShape(tuple(b.shape[0] for b in blocks)), blocks)
