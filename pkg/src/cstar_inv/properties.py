"""Randomised property suites run by ``cstar-inv check-properties``.

Each suite draws its own generator from ``(seed, suite index)`` so suites are
reproducible in isolation. A suite returns :class:`Check` records; ratio
checks store ``max(residual / threshold)`` against a threshold of 1 and count
checks store the number of failing instances against 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import sampling as smp
from .algebra import DEFAULT_TOL, ToleranceConfig, is_positive
from .equations import (douglas_solution, kernel_tower_invariance, range_inclusion_residual,
                        sts_solution, sts_threshold, verify_sts)
from .errors import CStarInvError, NotSolvable
from .module import inner_product, rank_one, right_action
from .operators import (Operator, kernel_projection, moore_penrose, penrose_residuals,
                        tikhonov_inverse, verify_adjoint_contract)
from .report import Check, count_check
from .spectral import (commutant_basis, eigen_submodule, find_hyperinvariant,
                       mp_reducing_verify, sample_commutant, spectrum, transport_by_unitary)
from .submodules import (Submodule, assemble_from_blocks, block_decompose, complement,
                         invariance_residual, is_invariant, is_reducing, reducing_residual)

__all__ = ["SuiteResult", "SUITES", "run_suites"]

_TINY = np.finfo(float).tiny


@dataclass
class SuiteResult:
    key: str
    title: str
    count: int
    checks: list[Check]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


class _Ratio:
    """Running maximum of ``residual / threshold``."""

    def __init__(self, name: str):
        self.name = name
        self.worst = 0.0

    def add(self, residual: float, threshold: float):
        self.worst = max(self.worst, residual / max(threshold, _TINY))
        return residual <= threshold

    def check(self) -> Check:
        return Check(self.name, self.worst, 1.0)


@dataclass
class _Suite:
    key: str
    title: str
    weight: float
    fn: Callable


SUITES: list[_Suite] = []


def _suite(key: str, title: str, weight: float = 1.0):
    def register(fn):
        SUITES.append(_Suite(key, title, weight, fn))
        return fn
    return register


def _scale(rng) -> float:
    return float(10 ** rng.uniform(-0.5, 0.7))


@_suite("cstar_axioms", "C*-identity and submultiplicativity", 2.0)
def _cstar_axioms(rng, n, tol):
    ident, submult = _Ratio("cstar_identity.max_ratio"), _Ratio("submultiplicativity.max_ratio")
    positive_failures = 0
    for _ in range(n):
        shape, _k = smp.random_shape_rank(rng)
        a = smp.random_element(rng, shape) * _scale(rng)
        b = smp.random_element(rng, shape) * _scale(rng)
        na, nb = a.norm(), b.norm()
        ident.add(abs((a.star() @ a).norm() - na ** 2), tol.threshold(na ** 2))
        submult.add(max(0.0, (a @ b).norm() - na * nb), tol.threshold(na * nb))
        positive_failures += not is_positive(a.star() @ a, tol)
    return [ident.check(), submult.check(), count_check("star_a_a_positive.failures", positive_failures)]


@_suite("penrose", "Moore-Penrose identities and Tikhonov cross-check", 2.0)
def _penrose(rng, n, tol):
    ratios = {name: _Ratio(f"penrose[{name}].max_ratio")
              for name in ("TXT=T", "XTX=X", "(TX)*=TX", "(XT)*=XT")}
    agree = _Ratio("svd_vs_tikhonov.max_relative_gap_over_1e-6")
    for j in range(n):
        shape, k = smp.random_shape_rank(rng)
        T = (smp.random_rank_deficient if j % 2 else smp.random_operator)(rng, shape, k) * _scale(rng)
        X = moore_penrose(T)
        thr = tol.threshold(T.norm())
        for name, res in penrose_residuals(T, X).items():
            ratios[name].add(res, thr)
        Y = tikhonov_inverse(T, 1e-12)
        gap = (X - Y).norm() / max(X.norm(), np.finfo(float).tiny)
        agree.add(gap, 1e-6)
    return [r.check() for r in ratios.values()] + [agree.check()]


def _pair(rng, invariant: bool):
    shape, k = smp.random_shape_rank(rng, min_total=2)
    if invariant:
        T, P, _, _ = smp.random_invariant_pair(rng, shape, k)
    else:
        T = smp.random_operator(rng, shape, k)
        ranks = smp.random_projection_ranks(rng, shape, k)
        P = smp.projection_from_frame(smp.random_frame(rng, shape, k), ranks, shape, k)
    return T * _scale(rng), Submodule(P)


@_suite("invariance_equivalence", "invariant submodule <=> PTP = TP <=> STS = TS solved by P")
def _invariance_equivalence(rng, n, tol):
    disagreements = trivial = 0
    for j in range(n):
        T, W = _pair(rng, invariant=j % 2 == 0)
        P = W.projection
        a = is_invariant(T, W, tol)
        b = float(np.linalg.norm(_dense_residual(T, P), 2)) <= tol.threshold(T.norm())
        sts = verify_sts(P, T, tol)
        c = sts.solves
        disagreements += not (a == b == c)
        trivial += not sts.nontrivial
    return [count_check("equivalence.disagreements", disagreements),
            count_check("nontrivial_projection_is_nontrivial_solution.failures", trivial)]


def _dense_residual(T: Operator, P: Operator) -> np.ndarray:
    # independent of the Operator arithmetic: one big block-diagonal matrix
    from scipy.linalg import block_diag

    t, p = block_diag(*T.blocks), block_diag(*P.blocks)
    return p @ t @ p - t @ p


@_suite("sts_family", "solution family Q + P Z (I - Q) of STS = TS")
def _sts_family(rng, n, tol):
    residual, proj = _Ratio("sts_residual.max_ratio"), _Ratio("z0_projection.max_ratio")
    for _ in range(n):
        T, W = _pair(rng, invariant=True)
        shape, k = T.shape, T.rank
        Z = smp.random_operator(rng, shape, k) * _scale(rng)
        S = sts_solution(T, W, Z, tol)
        residual.add(verify_sts(S, T, tol).residual, sts_threshold(S, T, tol))
        Q = sts_solution(T, W, None, tol)
        residual.add(verify_sts(Q, T, tol).residual, sts_threshold(Q, T, tol))
        proj.add(max((Q @ Q - Q).norm(), (Q.H - Q).norm()), tol.threshold(1.0))
    return [residual.check(), proj.check()]


def _zero_rows(T: Operator, rng) -> Operator:
    """Force at least one exactly zero row so that ``Ker(T^*)`` is nonzero."""
    blocks = [np.array(b) for b in T.blocks]
    i = int(rng.integers(len(blocks)))
    if not np.any(np.all(blocks[i] == 0, axis=1)):
        blocks[i][int(rng.integers(blocks[i].shape[0]))] = 0.0
    return Operator(T.shape, T.rank, blocks)


@_suite("douglas", "Douglas equation TX = S")
def _douglas(rng, n, tol):
    solved, spread = _Ratio("solvable.residual.max_ratio"), _Ratio("solution_difference.max_ratio")
    unsolved_accepted = 0
    margin = np.inf
    for _ in range(n):
        shape, k = smp.random_shape_rank(rng)
        T = smp.random_rank_deficient(rng, shape, k) * _scale(rng)
        R = smp.random_operator(rng, shape, k)
        S = T @ R
        Z1, Z2 = smp.random_operator(rng, shape, k), smp.random_operator(rng, shape, k)
        X1, X2 = douglas_solution(T, S, Z1, tol), douglas_solution(T, S, Z2, tol)
        solved.add((T @ X1 - S).norm(), tol.threshold(T.norm() * X1.norm(), S.norm()))
        spread.add((T @ (X1 - X2)).norm(), tol.threshold(T.norm() * (X1 - X2).norm()))
    for _ in range(n):
        shape, k = smp.random_shape_rank(rng)
        T = _zero_rows(smp.random_rank_deficient(rng, shape, k), rng)
        # N lives on the zero rows of T, hence in Ker(T^*) = Ran(T)^⊥
        mask = [np.all(np.asarray(b) == 0, axis=1).astype(float) for b in T.blocks]
        raw = smp.random_operator(rng, shape, k)
        N = Operator(shape, k, [m[:, None] * np.asarray(b) for m, b in zip(mask, raw.blocks)])
        N = N * (1.0 / N.norm())
        S = T @ smp.random_operator(rng, shape, k) + N
        try:
            douglas_solution(T, S, None, tol)
            unsolved_accepted += 1
        except NotSolvable as exc:
            margin = min(margin, exc.residual / max(exc.threshold, _TINY))
    return [solved.check(), spread.check(),
            count_check("unsolvable.accepted", unsolved_accepted),
            Check("unsolvable.min_residual_over_threshold.reciprocal_x10", 10.0 / margin, 1.0)]


@_suite("kernel_tower", "T maps Ker((I-S)^n) into Ker(I-S)", 0.5)
def _kernel_tower(rng, n, tol):
    failures, worst = 0, _Ratio("tower.max_ratio")
    for _ in range(n):
        T, W = _pair(rng, invariant=True)
        Z = smp.random_operator(rng, T.shape, T.rank)
        Z = Z * (0.5 / Z.norm())
        S = sts_solution(T, W, Z, tol)
        tower = kernel_tower_invariance(T, S, 4, tol)
        failures += not tower.passed
        for c in tower.checks:
            worst.add(c.residual, c.threshold)
    return [count_check("tower.failures", failures), worst.check()]


@_suite("block_decomposition", "corner decomposition round trip and invariance classification", 2.0)
def _decomposition(rng, n, tol):
    reassembly, roundtrip = _Ratio("reassembly.max_ratio"), _Ratio("roundtrip.max_ratio")
    disagreements = 0
    for j in range(n):
        T, W = _pair(rng, invariant=j % 2 == 0)
        A, B, C, D = block_decompose(T, W)
        thr = tol.threshold(T.norm())
        reassembly.add(((A + B + C + D) - T).norm(), thr)
        T2 = assemble_from_blocks(A, B, C, D, W, tol)
        for X, Y in zip((A, B, C, D), block_decompose(T2, W)):
            roundtrip.add((X - Y).norm(), thr)
        disagreements += (C.norm() <= thr) != is_invariant(T, W, tol)
    return [reassembly.check(), roundtrip.check(), count_check("corner_c_vs_is_invariant.disagreements",
                                                               disagreements)]


@_suite("contraction_unitary_corner", "unitary corner with B != 0 forces norm > 1", 0.5)
def _unitary_corner(rng, n, tol):
    not_expanding, bound = 0, _Ratio("norm_lower_bound.deficit.max_ratio")
    reducing_failures = 0
    for _ in range(n):
        shape, k = smp.random_shape_rank(rng, min_dim=2)
        ranks = smp.random_projection_ranks(rng, shape, k, proper_block=True)
        frame = smp.random_frame(rng, shape, k)
        unitary = lambda r, c: smp.random_unitary_matrix(rng, r)  # noqa: E731
        gauss = lambda r, c: smp.complex_gaussian(rng, r, c)  # noqa: E731
        target = rng.uniform(0.1, 1.0)
        B = smp.corner_operator(frame, ranks, shape, k, b=gauss)
        B = B * (target / B.norm())
        U = smp.corner_operator(frame, ranks, shape, k, a=unitary)
        D = smp.corner_operator(frame, ranks, shape, k, d=gauss)
        W = Submodule(smp.projection_from_frame(frame, ranks, shape, k))
        T = assemble_from_blocks(U, B, U * 0.0, D, W, tol)
        nT = T.norm()
        not_expanding += not nT > 1.0
        bound.add(max(0.0, np.sqrt(1 + B.norm() ** 2) - nT), tol.threshold(nT))
        # with B = 0 and a contractive D the unitary corner reduces T
        D0 = D * (0.9 / max(D.norm(), 1e-300))
        T0 = assemble_from_blocks(U, U * 0.0, U * 0.0, D0, W, tol)
        reducing_failures += not (T0.norm() <= 1 + tol.threshold(1.0) and is_reducing(T0, W, tol))
    return [count_check("norm_not_above_1", not_expanding), bound.check(),
            count_check("b0_contraction_not_reducing", reducing_failures)]


@_suite("mp_reducing", "reducing W with Re T >= 0.5 I also reduces T^+ (and T^-1)")
def _mp_reducing(rng, n, tol):
    conclusion = _Ratio("mp_commutator.max_ratio")
    failures = not_invertible = 0
    for _ in range(n):
        shape, k = smp.random_shape_rank(rng, min_total=2)
        ranks = smp.random_projection_ranks(rng, shape, k)
        frame = smp.random_frame(rng, shape, k)
        W = Submodule(smp.projection_from_frame(frame, ranks, shape, k))

        def accretive(r, c):
            g = smp.complex_gaussian(rng, r, r)
            h = smp.complex_gaussian(rng, r, r)
            return (0.5 + rng.uniform(0, 0.5)) * np.eye(r) + 0.5 * g @ g.conj().T + (h - h.conj().T)

        T = smp.corner_operator(frame, ranks, shape, k, a=accretive, d=accretive)
        rep = mp_reducing_verify(T, W, tol)
        failures += not rep.conclusion_holds
        not_invertible += not rep.invertible
        c = rep.conclusions[0]
        conclusion.add(c.residual, c.threshold)
    return [conclusion.check(), count_check("conclusion.failures", failures),
            count_check("inverse_subcase.missing", not_invertible)]


def _spectral_operator(rng, j):
    shape, k = smp.random_shape_rank(rng)
    kind = j % 3
    if kind == 0:
        return smp.random_operator(rng, shape, k) * _scale(rng)
    if kind == 1:
        # normal operator with repeated eigenvalues
        blocks = []
        for nb in shape.block_dims:
            m = k * nb
            vals = smp.complex_gaussian(rng, max(1, m // 2))
            d = vals[rng.integers(len(vals), size=m)]
            q = smp.random_unitary_matrix(rng, m)
            blocks.append(q @ np.diag(d) @ q.conj().T)
        return Operator(shape, k, blocks)
    # planted module eigenvector x with K x = lam x
    M = smp.random_operator(rng, shape, k)
    x = smp.random_vector(rng, shape, k)
    lam = complex(smp.complex_gaussian(rng, 1)[0]) + 2.0
    blocks = []
    for m_b, x_b in zip(M.blocks, x.blocks):
        gram_inv = np.linalg.inv(x_b.conj().T @ x_b)
        blocks.append(m_b + (lam * x_b - m_b @ x_b) @ gram_inv @ x_b.conj().T)
    return Operator(shape, k, blocks)


@_suite("eigen_submodules", "every nonzero spectral point has a nonzero eigen-submodule")
def _eigen_submodules(rng, n, tol):
    norm_deficit = _Ratio("eigen_projection.norm_deficit.max_ratio")
    invariance = _Ratio("eigen_submodule.invariance.max_ratio")
    for j in range(n):
        K = _spectral_operator(rng, j)
        spec = spectrum(K)
        for lam in spec.nonzero():
            W = eigen_submodule(K, lam, tol, spec)
            norm_deficit.add(max(0.0, 1.0 - W.projection.norm()), 1e-9)
            invariance.add(invariance_residual(K, W), tol.threshold(K.norm()))
    return [norm_deficit.check(), invariance.check()]


@_suite("hyperinvariant", "proper nonzero hyperinvariant submodules")
def _hyperinvariant(rng, n, tol):
    trivial, commuting, invariance = 0, _Ratio("commutant.commutator.max_ratio"), \
        _Ratio("commutant.invariance.max_ratio")
    planted = max(1, n // 4)
    for j in range(n):
        if j < planted:
            shape, k = smp.random_shape_rank(rng, min_dim=2)
            K = smp.random_nilpotent(rng, shape, k)
        else:
            shape, k = smp.random_shape_rank(rng, min_total=2)
            K = smp.random_operator(rng, shape, k)
        W, _kind = find_hyperinvariant(K, tol)
        trivial += not W.nontrivial(tol)
        for S in sample_commutant(commutant_basis(K), rng, 20):
            commuting.add((K @ S - S @ K).norm(), tol.threshold(K.norm() * S.norm()))
            invariance.add(invariance_residual(S, W), tol.threshold(S.norm()))
    return [count_check("trivial_submodules", trivial), commuting.check(), invariance.check()]


@_suite("unitary_transport", "reducibility is preserved under unitary equivalence", 0.5)
def _unitary_transport(rng, n, tol):
    transported, trivial = _Ratio("transported_commutator.max_ratio"), 0
    for _ in range(n):
        shape, k = smp.random_shape_rank(rng, min_total=2)
        T, P, _, _ = smp.random_invariant_pair(rng, shape, k, reducing=True)
        W = Submodule(P)
        U = smp.random_unitary(rng, shape, k)
        Q = transport_by_unitary(W, U, tol)
        S = U.H @ T @ U
        transported.add(reducing_residual(S, Q), tol.threshold(S.norm()))
        trivial += not Q.nontrivial(tol)
    return [transported.check(), count_check("nontriviality_lost", trivial)]


@_suite("module_axioms", "inner-product axioms, Cauchy-Schwarz and rank-one adjoints")
def _module_axioms(rng, n, tol):
    cs, lin, herm = _Ratio("cauchy_schwarz.max_ratio"), _Ratio("right_linearity.max_ratio"), \
        _Ratio("hermitian_symmetry.max_ratio")
    adj, contract = _Ratio("rank_one_adjoint.max_ratio"), _Ratio("adjoint_contract.max_ratio")
    for _ in range(n):
        shape, k = smp.random_shape_rank(rng)
        x, y = smp.random_vector(rng, shape, k), smp.random_vector(rng, shape, k)
        a = smp.random_element(rng, shape)
        ip = inner_product(x, y)
        scale = x.norm() * y.norm()
        cs.add(max(0.0, ip.norm() - scale), tol.threshold(scale))
        lhs, rhs = inner_product(x, right_action(y, a)), ip @ a
        lin.add((lhs - rhs).norm(), tol.threshold(scale * a.norm()))
        herm.add((ip.star() - inner_product(y, x)).norm(), tol.threshold(scale))
        th = rank_one(x, y)
        adj.add((th.H - rank_one(y, x)).norm(), tol.threshold(scale))
        contract.add(verify_adjoint_contract(th, 4, tol, rng), tol.rtol)
    return [cs.check(), lin.check(), herm.check(), adj.check(), contract.check()]


@_suite("commuting_kernels", "kernels and ranges of commuting operators are invariant")
def _commuting_kernels(rng, n, tol):
    worst = _Ratio("kernel_range_invariance.max_ratio")
    for _ in range(n):
        shape, k = smp.random_shape_rank(rng)
        # T and S are polynomials in a common A with a planted kernel
        A = smp.random_rank_deficient(rng, shape, k)
        one = A.identity()
        c = smp.complex_gaussian(rng, 4)
        T = A @ (one * c[0] + A * c[1])
        S = one * c[2] + A * c[3] + A @ A
        p = smp.complex_gaussian(rng, 3)
        pT = T @ T @ T + T @ T * p[0] + T * p[1] + one * p[2]
        for X in (T, pT):
            ker = Submodule(kernel_projection(X))
            ran = Submodule(moore_penrose(X).H @ X.H)
            for V in (ker, ran):
                worst.add(invariance_residual(S, V), tol.threshold(S.norm()))
    return [worst.check()]


@_suite("ts_zero", "TS = 0 gives common invariant submodules Ker(T) and Ran(S)")
def _ts_zero(rng, n, tol):
    worst = _Ratio("ker_t_ran_s_invariance.max_ratio")
    inclusion = _Ratio("ran_s_in_ker_t.max_ratio")
    for _ in range(n):
        shape, k = smp.random_shape_rank(rng, min_total=2)
        ranks = smp.random_projection_ranks(rng, shape, k)
        Q = smp.projection_from_frame(smp.random_frame(rng, shape, k), ranks, shape, k)
        S = Q @ smp.random_operator(rng, shape, k)
        T = smp.random_operator(rng, shape, k) @ (Q.identity() - Q)
        kerT = Submodule(kernel_projection(T))
        ranS = Submodule(moore_penrose(S).H @ S.H)
        inclusion.add(range_inclusion_residual(kerT.projection, S), tol.threshold(S.norm()))
        for X in (T, S):
            for V in (kerT, ranS):
                worst.add(invariance_residual(X, V), tol.threshold(X.norm()))
    return [inclusion.check(), worst.check()]


@_suite("adjoint_corners", "corner symmetry and restriction adjoints")
def _adjoint_corners(rng, n, tol):
    sym, restr = _Ratio("corner_symmetry.max_ratio"), _Ratio("restricted_adjoint.max_ratio")
    comm = _Ratio("commuting_projection_reduces.max_ratio")
    for j in range(n):
        T, W = _pair(rng, invariant=j % 2 == 0)
        P = W.projection
        Pc = complement(W).projection
        thr = tol.threshold(T.norm())
        sym.add(abs((Pc @ T @ P).norm() - (P @ T.H @ Pc).norm()), thr)
        restr.add(((P @ T @ P).H - P @ T.H @ P).norm(), thr)
        # a projection commuting with T reduces T and its complement is invariant
        R, Pr, _, _ = smp.random_invariant_pair(rng, T.shape, T.rank, reducing=True)
        Wr = Submodule(Pr)
        comm.add(max(invariance_residual(R, Wr), invariance_residual(R, complement(Wr)),
                     invariance_residual(R.H, Wr)), tol.threshold(R.norm()))
    return [sym.check(), restr.check(), comm.check()]


def run_suites(seed: int = 7, cases: int = 100, tol: ToleranceConfig = DEFAULT_TOL,
               only: list[str] | None = None) -> list[SuiteResult]:
    """Run the registered suites; ``cases`` scales every suite's instance count."""
    results = []
    for index, s in enumerate(SUITES):
        if only is not None and s.key not in only:
            continue
        rng = np.random.default_rng([seed, index])
        n = max(1, int(round(cases * s.weight)))
        try:
            checks = s.fn(rng, n, tol)
        except (CStarInvError, ValueError):
            # a precondition that fails inside a suite is a property failure
            checks = [count_check("raised_precondition_failure", 1)]
        results.append(SuiteResult(s.key, s.title, n, checks))
    return results

