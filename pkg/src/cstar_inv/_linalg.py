"""Dense complex matrix kernels used by the operator layer.

All rank decisions share one cutoff: a singular value counts as zero when it
is at most ``scale * dim * RANK_RTOL``. ``scale`` defaults to the largest
singular value of the matrix itself; block-diagonal callers pass the norm of
the whole operator so that a block made only of rounding noise counts as zero.
"""

import numpy as np

RANK_RTOL = 1e-12


def rank_cutoff(s: np.ndarray, dim: int, scale: float | None = None) -> float:
    if scale is None:
        scale = float(s[0]) if s.size else 0.0
    return scale * dim * RANK_RTOL


def _rank(s: np.ndarray, dim: int, scale: float | None) -> int:
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.count_nonzero(s > rank_cutoff(s, dim, scale)))


def numerical_rank(m: np.ndarray, scale: float | None = None) -> int:
    return _rank(np.linalg.svd(m, compute_uv=False), max(m.shape), scale)


def pinv(m: np.ndarray, scale: float | None = None) -> np.ndarray:
    """Moore-Penrose inverse through the SVD with the shared rank cutoff."""
    u, s, vh = np.linalg.svd(m, full_matrices=False)
    r = _rank(s, max(m.shape), scale)
    return (vh[:r].conj().T / s[:r]) @ u[:, :r].conj().T


def kernel_projector(m: np.ndarray, min_nullity: int = 0, scale: float | None = None) -> np.ndarray:
    """Orthogonal projection onto ``Ker(m)``, i.e. ``I - m^+ m``.

    ``min_nullity`` forces at least that many trailing right singular vectors
    into the kernel; used when the caller already knows ``m`` is singular.
    """
    n = m.shape[1]
    _, s, vh = np.linalg.svd(m, full_matrices=True)
    r = min(_rank(s, max(m.shape), scale), n - min_nullity)
    null = vh[r:].conj().T
    return null @ null.conj().T


def range_projector(m: np.ndarray, scale: float | None = None) -> np.ndarray:
    """Orthogonal projection onto ``Ran(m)``, i.e. ``m m^+``."""
    u, s, _ = np.linalg.svd(m, full_matrices=False)
    r = _rank(s, max(m.shape), scale)
    return u[:, :r] @ u[:, :r].conj().T
