"""Spectra, numerical-range certificates, commutants and hyperinvariant submodules."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _linalg
from .algebra import DEFAULT_TOL, ToleranceConfig
from .errors import (NotSpectral, NotUnitary, PreconditionFailed, ScalarOperator,
                     ZeroOperator)
from .module import ModuleVector, inner_product
from .operators import Operator, apply, is_unitary, kernel_projection, moore_penrose
from .report import Check
from .submodules import Submodule, reducing_residual

__all__ = [
    "CLUSTER_TOL",
    "SpectrumReport",
    "spectrum",
    "eigen_submodule",
    "NumRangeCertificate",
    "EXCLUDED",
    "WITNESS",
    "INCONCLUSIVE",
    "hermitian_bound",
    "zero_exclusion_certificate",
    "zero_witness_search",
    "numerical_range_objective",
    "MpReducingReport",
    "mp_reducing_verify",
    "commutant_basis",
    "sample_commutant",
    "find_hyperinvariant",
    "EIGENSPACE",
    "KERNEL",
    "transport_by_unitary",
]

CLUSTER_TOL = 1e-8
# K_i^m / ||K_i||^m below m * NILPOTENT_RTOL counts as zero
NILPOTENT_RTOL = 1e-13


def _is_nilpotent_block(b: np.ndarray) -> bool:
    m = b.shape[0]
    scale = np.linalg.norm(b, 2)
    if scale == 0.0:
        return True
    c = b / scale
    p = np.eye(m, dtype=complex)
    for _ in range(m):
        p = p @ c
    return float(np.linalg.norm(p, 2)) <= m * NILPOTENT_RTOL


def _snap_block(b: np.ndarray, scale: float) -> tuple[np.ndarray, bool]:
    """Eigenvalues of one block with the zero cluster made exact.

    A nilpotent block reports only zeros. Otherwise the ``nullity`` eigenvalues
    of smallest modulus are set to zero, ``nullity`` being the numerical
    dimension of the kernel.
    """
    m = b.shape[0]
    if _is_nilpotent_block(b):
        return np.zeros(m, dtype=complex), True
    ev = np.linalg.eigvals(b).astype(complex)
    nullity = m - _linalg.numerical_rank(b, scale)
    if nullity:
        ev[np.argsort(np.abs(ev), kind="stable")[:nullity]] = 0.0
    return ev, nullity > 0


def _cluster(values: list[complex]) -> list[tuple[complex, int]]:
    """Merge values within ``CLUSTER_TOL`` (single linkage), deterministically ordered."""
    vals = sorted(values, key=lambda z: (z.real, z.imag))
    parent = list(range(len(vals)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(len(vals)):
        for j in range(i + 1, len(vals)):
            if abs(vals[i] - vals[j]) <= CLUSTER_TOL:
                parent[find(j)] = find(i)
    groups: dict[int, list[complex]] = {}
    for i, z in enumerate(vals):
        groups.setdefault(find(i), []).append(z)
    merged = []
    for members in groups.values():
        rep = 0j if any(z == 0 for z in members) else complex(np.mean(members))
        merged.append((rep, len(members)))
    merged.sort(key=lambda t: (t[0].real, t[0].imag))
    return merged


@dataclass
class SpectrumReport:
    block_eigenvalues: list[np.ndarray]
    eigenvalues: list[tuple[complex, int]]
    contains_zero: bool
    nilpotent_blocks: list[bool] = field(default_factory=list)

    def nonzero(self) -> list[complex]:
        return [z for z, _ in self.eigenvalues if abs(z) > CLUSTER_TOL]


def spectrum(K: Operator) -> SpectrumReport:
    """Union of the block spectra, merged with multiplicity."""
    per_block, singular, nilpotent = [], False, []
    scale = K.norm()
    for b in K.blocks:
        ev, sing = _snap_block(b, scale)
        per_block.append(ev)
        singular = singular or sing
        nilpotent.append(_is_nilpotent_block(b))
    merged = _cluster([complex(z) for ev in per_block for z in ev])
    return SpectrumReport(per_block, merged, singular, nilpotent)


def eigen_submodule(K: Operator, lam: complex, tol: ToleranceConfig = DEFAULT_TOL,
                    spec: SpectrumReport | None = None) -> Submodule:
    """``Ker(lam I - K)`` as a submodule; raises :class:`NotSpectral` off the spectrum.

    In every block where ``lam`` is an eigenvalue at least one direction is
    kept, so a spectral point never yields the zero submodule.
    """
    spec = spectrum(K) if spec is None else spec
    slack = max(CLUSTER_TOL, tol.threshold(K.norm()) - tol.atol)
    hits = [ev.size > 0 and float(np.min(np.abs(ev - lam))) <= slack for ev in spec.block_eigenvalues]
    if not any(hits):
        raise NotSpectral(f"{lam} is not in the spectrum")
    shifted = [lam * np.eye(b.shape[0]) - b for b in K.blocks]
    scale = max(float(np.linalg.norm(L, 2)) for L in shifted)
    blocks = [_linalg.kernel_projector(L, min_nullity=int(hit), scale=scale)
              for L, hit in zip(shifted, hits)]
    return Submodule(Operator(K.shape, K.rank, blocks))


EXCLUDED = "ExcludedByHermitianBound"
WITNESS = "WitnessFound"
INCONCLUSIVE = "Inconclusive"


@dataclass
class NumRangeCertificate:
    """Evidence about whether ``0`` lies in ``{<Tx, x> : ||x|| = 1}``.

    ``bound`` is the smallest eigenvalue of the Hermitian part over blocks.
    A witness is a unit vector with ``||<Tx, x>||`` at most ``10 * atol``.
    """

    kind: str
    bound: float
    witness: ModuleVector | None = None
    objective: float | None = None


def hermitian_bound(T: Operator) -> float:
    return min(float(np.linalg.eigvalsh((b + b.conj().T) / 2)[0]) for b in T.blocks)


def numerical_range_objective(T: Operator, x: ModuleVector) -> float:
    """``||<Tx, x>|| / ||x||^2``."""
    n = x.norm()
    return inner_product(apply(T, x), x).norm() / (n * n)


def _gauss_newton_zero(M: np.ndarray, v: np.ndarray, target: float, max_iter: int):
    """Drive ``v^H M v`` to zero over unit vectors; returns ``(v, |r|, iterations)``."""
    v = v / np.linalg.norm(v)
    r = np.vdot(v, M @ v)
    it = 0
    while it < max_iter and abs(r) > target:
        it += 1
        p, q = M.conj().T @ v, M @ v
        ga, gb = p.conj() + q, 1j * (p.conj() - q)
        J = np.vstack([np.concatenate([ga.real, gb.real]), np.concatenate([ga.imag, gb.imag])])
        step = -np.linalg.lstsq(J, np.array([r.real, r.imag]), rcond=None)[0]
        m = v.size
        dv = step[:m] + 1j * step[m:]
        for _ in range(8):
            w = v + dv
            w = w / np.linalg.norm(w)
            rw = np.vdot(w, M @ w)
            if abs(rw) < abs(r):
                v, r = w, rw
                break
            dv = dv / 2
        else:
            break
    return v, abs(r), it


def zero_witness_search(T: Operator, budget: int | None = None, seed: int | None = None,
                        tol: ToleranceConfig = DEFAULT_TOL) -> ModuleVector | None:
    """Randomised multi-start search for a unit ``x`` with ``<Tx, x> ≈ 0``.

    ``<Tx, x>`` vanishes as soon as one column of one block of ``x`` gives
    ``v^H T_i v = 0``, so each start runs a damped Gauss-Newton descent on a
    single column. ``budget`` caps the total number of iterations. The result
    is deterministic for a given seed; ``None`` means no witness was found.
    """
    budget = tol.search_budget if budget is None else budget
    seed = tol.seed if seed is None else seed
    rng = np.random.default_rng(seed)
    target = 10 * tol.atol
    spent, start = 0, 0
    while spent < budget:
        i = start % T.shape.num_blocks
        start += 1
        M = np.asarray(T.blocks[i])
        m = M.shape[0]
        v0 = rng.standard_normal(m) + 1j * rng.standard_normal(m)
        v, obj, it = _gauss_newton_zero(M, v0, target / 2, min(60, budget - spent))
        spent += max(it, 1)
        if obj <= target:
            x = _column_vector(T, i, v)
            if numerical_range_objective(T, x) <= target:
                return x
    return None


def _column_vector(T: Operator, i: int, v: np.ndarray) -> ModuleVector:
    blocks = []
    for j, n in enumerate(T.shape.block_dims):
        b = np.zeros((T.rank * n, n), dtype=complex)
        if j == i:
            b[:, 0] = v
        blocks.append(b)
    return ModuleVector(T.shape, T.rank, blocks)


def zero_exclusion_certificate(T: Operator, tol: ToleranceConfig = DEFAULT_TOL) -> NumRangeCertificate:
    """Certify ``0 ∉ ω(T)`` by a positive Hermitian part, or look for a witness.

    ``Re <Tx, x> >= eps <x, x>`` with ``eps > 0`` rules out ``<Tx, x> = 0`` for
    unit ``x``. When the bound fails the search may still come back empty,
    which yields ``Inconclusive``: the bound is sufficient, not necessary.
    """
    eps = hermitian_bound(T)
    if eps > tol.threshold(T.norm()):
        return NumRangeCertificate(EXCLUDED, eps)
    x = zero_witness_search(T, tol=tol)
    if x is not None:
        return NumRangeCertificate(WITNESS, eps, x, numerical_range_objective(T, x))
    return NumRangeCertificate(INCONCLUSIVE, eps)


@dataclass
class MpReducingReport:
    hypotheses: list[Check] = field(default_factory=list)
    conclusions: list[Check] = field(default_factory=list)
    certificate: NumRangeCertificate | None = None
    invertible: bool = False

    @property
    def hypotheses_hold(self) -> bool:
        return all(c.passed for c in self.hypotheses)

    @property
    def conclusion_holds(self) -> bool:
        return all(c.passed for c in self.conclusions)

    @property
    def violation(self) -> bool:
        """Conclusion fails; only meaningful for probes without the hypotheses."""
        return not self.conclusion_holds

    @property
    def checks(self) -> list[Check]:
        return self.hypotheses + self.conclusions


def _invertible(T: Operator) -> bool:
    scale = T.norm()
    return all(_linalg.numerical_rank(b, scale) == b.shape[0] for b in T.blocks)


def mp_reducing_verify(T: Operator, W: Submodule, tol: ToleranceConfig = DEFAULT_TOL,
                       require_hypotheses: bool = True) -> MpReducingReport:
    """Check that a reducing ``W`` with ``0 ∉ ω(T)`` also reduces ``T^+``.

    The numerical-range hypothesis is certified through the Hermitian-part
    bound only. With ``require_hypotheses=False`` failing hypotheses are
    recorded instead of raised, which turns the call into a probe.
    """
    report = MpReducingReport()
    red = Check("hypothesis.reducing", reducing_residual(T, W), tol.threshold(T.norm()))
    eps = hermitian_bound(T)
    thr = tol.threshold(T.norm())
    report.certificate = NumRangeCertificate(EXCLUDED, eps) if eps > thr else None
    herm = Check("hypothesis.hermitian_deficit", max(0.0, thr - eps), 0.0)
    report.hypotheses = [red, herm]
    if require_hypotheses:
        if not red.passed:
            raise PreconditionFailed(f"W does not reduce T: ||TP - PT|| = {red.residual:.3e}",
                                     red.residual, red.threshold)
        if not herm.passed:
            raise PreconditionFailed(
                f"0 ∉ ω(T) is not certified: Hermitian part bound {eps:.3e} <= {thr:.3e}",
                eps, thr)
    Tp = moore_penrose(T)
    report.conclusions.append(Check("mp.commutator", reducing_residual(Tp, W), tol.threshold(Tp.norm())))
    report.invertible = _invertible(T)
    if report.invertible:
        Tinv = Operator(T.shape, T.rank, [np.linalg.inv(b) for b in T.blocks])
        report.conclusions.append(Check("inverse.agreement", (Tp - Tinv).norm(), tol.threshold(Tinv.norm())))
        report.conclusions.append(Check("inverse.commutator", reducing_residual(Tinv, W),
                                        tol.threshold(Tinv.norm())))
    return report


def commutant_basis(K: Operator) -> list[Operator]:
    """A Hilbert-Schmidt orthonormal basis of ``{S : KS = SK}``.

    Per block the commutator ``X -> K_i X - X K_i`` is vectorised and its null
    space taken from the SVD; each basis element lives in a single block.
    """
    basis = []
    scale = 2 * K.norm()
    for i, b in enumerate(K.blocks):
        m = b.shape[0]
        eye = np.eye(m)
        C = np.kron(eye, b) - np.kron(b.T, eye)
        _, s, vh = np.linalg.svd(C)
        r = 0 if s[0] == 0.0 else int(np.count_nonzero(s > _linalg.rank_cutoff(s, m * m, scale)))
        for vec in vh[r:].conj():
            X = vec.reshape((m, m), order="F")
            blocks = [X if j == i else np.zeros_like(K.blocks[j]) for j in range(len(K.blocks))]
            basis.append(Operator(K.shape, K.rank, blocks))
    return basis


def sample_commutant(basis: list[Operator], rng: np.random.Generator, count: int) -> list[Operator]:
    """Random complex combinations of commutant basis elements."""
    out = []
    for _ in range(count):
        c = (rng.standard_normal(len(basis)) + 1j * rng.standard_normal(len(basis))) / np.sqrt(2)
        S = basis[0] * c[0]
        for cj, B in zip(c[1:], basis[1:]):
            S = S + B * cj
        out.append(S)
    return out


EIGENSPACE = "eigenspace"
KERNEL = "kernel"


def find_hyperinvariant(K: Operator, tol: ToleranceConfig = DEFAULT_TOL) -> tuple[Submodule, str]:
    """A proper nonzero submodule invariant under everything commuting with ``K``.

    A nonzero eigenvalue gives its eigenspace (the one of largest modulus is
    used). When the spectrum is ``{0}`` the operator is nilpotent and its
    kernel is returned instead; kernels of commuting operators are invariant.
    """
    nK = K.norm()
    if nK <= tol.atol:
        raise ZeroOperator("the zero operator has no proper nonzero hyperinvariant submodule")
    total = sum(b.shape[0] for b in K.blocks)
    lam0 = sum(np.trace(b) for b in K.blocks) / total
    if (K - K.identity() * lam0).norm() <= tol.threshold(nK):
        raise ScalarOperator(f"K = ({complex(lam0):.6g}) I commutes with everything; "
                             "no proper submodule is hyperinvariant")
    spec = spectrum(K)
    nonzero = sorted(spec.nonzero(), key=lambda z: (-abs(z), z.real, z.imag))
    if nonzero:
        W, kind = eigen_submodule(K, nonzero[0], tol, spec), EIGENSPACE
    else:
        W, kind = Submodule(kernel_projection(K)), KERNEL
    if not W.nontrivial(tol):
        raise PreconditionFailed(f"{kind} construction produced a trivial submodule")
    return W, kind


def transport_by_unitary(W: Submodule, U: Operator, tol: ToleranceConfig = DEFAULT_TOL) -> Submodule:
    """``U^* P U``: the submodule that reduces ``U^* T U`` whenever ``W`` reduces ``T``."""
    if not is_unitary(U, tol):
        raise NotUnitary("U is not unitary")
    return Submodule(U.H @ W.projection @ U, tol=tol)
